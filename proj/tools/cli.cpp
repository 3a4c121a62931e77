#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pencilkit/errors.hpp"
#include "pencilkit/pencil_io.hpp"
#include "pencilkit/report.hpp"

namespace pencilkit::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct InputFlags {
  std::string e_path;
  std::string a_path;
  std::string json_path;
  double tol = Tolerance{}.rel;

  void add_to(CLI::App& app) {
    app.add_option("--E", e_path, "Matrix Market file for E");
    app.add_option("--A", a_path, "Matrix Market file for A");
    app.add_option("--json", json_path, "pencil JSON file");
    app.add_option("--tol", tol, "relative rank tolerance")->capture_default_str();
  }

  Tolerance tolerance() const {
    Tolerance t;
    t.rel = tol;
    t.validate();
    return t;
  }

  AnyPencil load() const {
    const bool mm = !e_path.empty() || !a_path.empty();
    if (mm && !json_path.empty()) {
      throw InputError("give either --E/--A or --json, not both");
    }
    if (mm) {
      if (e_path.empty() || a_path.empty()) {
        throw InputError("--E and --A must be given together");
      }
      return load_pencil_matrix_market(e_path, a_path);
    }
    if (json_path.empty()) {
      throw InputError("no input: give --E and --A, or --json");
    }
    return load_pencil_json(json_path);
  }
};

struct OutputFlags {
  std::string out_path;
  std::string format = "json";

  void add_to(CLI::App& app) {
    app.add_option("--out", out_path, "output file");
    app.add_option("--format", format, "json or text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
  }

  /// JSON goes to --out, or to stdout when no file is given and the format
  /// is json; text summaries always go to stdout.
  void emit(const json& j, const std::string& text, std::ostream& out) const {
    if (!out_path.empty()) {
      write_json_file(j, out_path);
    }
    if (format == "text") {
      out << text;
    } else if (out_path.empty()) {
      out << canonical_dump(j) << "\n";
    }
  }
};

json header(const AnyPencil& p, const Tolerance& tol) {
  return std::visit(
      [&](const auto& q) {
        return json{{"schema_version", kReportSchemaVersion},
                    {"input_digest", input_digest(p)},
                    {"field", std::string(to_string(q.field()))},
                    {"shape", {q.rows(), q.cols()}},
                    {"tolerance", {{"rel", real_to_json(tol.rel)},
                                   {"abs_floor", real_to_json(tol.abs_floor)}}}};
      },
      p);
}

/// "1.5", "-2i", "1-3.5i", "i".
std::complex<double> parse_complex(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  auto number = [&](const std::string& t) {
    if (t.empty() || t == "+") {
      return 1.0;
    }
    if (t == "-") {
      return -1.0;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw InputError("bad complex number \"" + s + "\"");
    }
    if (used != t.size()) {
      throw InputError("bad complex number \"" + s + "\"");
    }
    return v;
  };
  if (s.empty()) {
    throw InputError("empty complex number");
  }
  if (s.back() != 'i') {
    return {number(s), 0.0};
  }
  const std::string body = s.substr(0, s.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) {
    return {0.0, number(body)};
  }
  return {number(body.substr(0, split)), number(body.substr(split))};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    parts.push_back(item);
  }
  return parts;
}

/// "re0:re1:nre,im0:im1:nim", endpoints included.
std::vector<std::complex<double>> parse_grid(const std::string& s) {
  const auto axes = split(s, ',');
  if (axes.size() != 2) {
    throw InputError("--grid expects re0:re1:nre,im0:im1:nim");
  }
  std::vector<std::vector<double>> values;
  for (const auto& axis : axes) {
    const auto f = split(axis, ':');
    if (f.size() != 3) {
      throw InputError("--grid expects re0:re1:nre,im0:im1:nim");
    }
    double lo = 0.0;
    double hi = 0.0;
    long count = 0;
    try {
      lo = std::stod(f[0]);
      hi = std::stod(f[1]);
      count = std::stol(f[2]);
    } catch (const std::exception&) {
      throw InputError("--grid: bad number in \"" + axis + "\"");
    }
    if (count < 1 || count > 10000) {
      throw InputError("--grid: point counts must lie in [1, 10000]");
    }
    std::vector<double> v;
    for (long k = 0; k < count; ++k) {
      v.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (count - 1));
    }
    values.push_back(std::move(v));
  }
  std::vector<std::complex<double>> out;
  for (double im : values[1]) {
    for (double re : values[0]) {
      out.emplace_back(re, im);
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// analyze

struct AnalyzeFlags {
  InputFlags in;
  OutputFlags out;
  std::optional<Index> max_steps;
  std::string batch_dir;
  unsigned jobs = 1;
};

void analyze_one(const AnyPencil& p, const AnalyzeFlags& f, std::ostream& out) {
  AnalysisOptions opt;
  opt.tol = f.in.tolerance();
  opt.max_steps = f.max_steps;
  const AnalysisReport r = analyze(p, opt);
  f.out.emit(to_json(r), text_summary(r), out);
}

template <class Fn>
int guarded(std::ostream& err, const std::string& context, Fn&& fn) {
  const std::string prefix = context.empty() ? "" : context + ": ";
  try {
    fn();
    return kExitOk;
  } catch (const InputError& e) {
    err << prefix << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    err << prefix << "internal inconsistency: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << prefix << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run_batch(const AnalyzeFlags& f, std::ostream& out, std::ostream& err) {
  if (!f.in.e_path.empty() || !f.in.a_path.empty() || !f.in.json_path.empty()) {
    err << "input error: --batch replaces --E/--A/--json\n";
    return kExitInput;
  }
  if (f.out.out_path.empty()) {
    err << "input error: --batch needs --out naming an output directory\n";
    return kExitInput;
  }
  if (!fs::is_directory(f.batch_dir)) {
    err << "input error: not a directory: " << f.batch_dir << "\n";
    return kExitInput;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(f.batch_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::error_code ec;
  fs::create_directories(f.out.out_path, ec);
  if (ec) {
    err << "input error: cannot create " << f.out.out_path << ": " << ec.message() << "\n";
    return kExitInput;
  }

  std::vector<int> codes(files.size(), kExitOk);
  std::vector<std::string> messages(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < files.size(); k = next++) {
      std::ostringstream local_err;
      codes[k] = guarded(local_err, files[k].string(), [&] {
        AnalyzeFlags one = f;
        one.out.out_path = (fs::path(f.out.out_path) / (files[k].stem().string() + ".report.json"))
                               .string();
        one.out.format = "json";
        std::ostringstream sink;
        analyze_one(load_pencil_json(files[k]), one, sink);
      });
      messages[k] = local_err.str();
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(f.jobs, files.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }

  int code = kExitOk;
  for (std::size_t k = 0; k < files.size(); ++k) {
    err << messages[k];
    code = std::max(code, codes[k]);
    if (f.out.format == "text") {
      out << files[k].filename().string() << ": " << (codes[k] == kExitOk ? "ok" : "failed") << "\n";
    }
  }
  return code;
}

// --------------------------------------------------------------------------
// reduce

struct ReduceFlags {
  InputFlags in;
  OutputFlags out;
  std::string kind = "obs";
  Index steps = 1;
  std::string mtx_dir;
};

template <class Scalar>
void reduce_cmd(const Pencil<Scalar>& p, const AnyPencil& any, const ReduceFlags& f,
                std::ostream& out, std::ostream& err) {
  const Tolerance tol = f.in.tolerance();
  if (f.steps < 0) {
    throw InputError("--steps must be non-negative");
  }
  const ReductionKind kind = f.kind == "obs" ? ReductionKind::observation : ReductionKind::control;
  std::vector<std::string> warnings;
  ReductionChain<Scalar> chain;
  if (f.steps > 0) {
    chain = kind == ReductionKind::observation ? observation_chain(p, tol, f.steps)
                                               : control_chain(p, tol, f.steps);
  }
  const Pencil<Scalar>& reduced = chain.final_pencil(p);
  Matrix<Scalar> domain = Matrix<Scalar>::Identity(p.cols(), p.cols());
  Matrix<Scalar> codomain = Matrix<Scalar>::Identity(p.rows(), p.rows());
  if (!chain.steps.empty()) {
    domain = chain.domain_maps.back();
    codomain = chain.codomain_maps.back();
  }
  const auto steps_taken = static_cast<Index>(chain.steps.size());
  if (f.steps > 0 && steps_taken == 0) {
    warnings.push_back("irreducible");
  } else if (steps_taken < f.steps) {
    warnings.push_back("irreducible after " + std::to_string(steps_taken) + " steps");
  }
  for (const auto& w : warnings) {
    err << "warning: " << w << "\n";
  }

  json steps = json::array();
  for (std::size_t k = 0; k < chain.steps.size(); ++k) {
    const auto& s = chain.steps[k];
    StepSummary sum;
    sum.kind = s.kind;
    sum.parent_rows = s.parent_rows;
    sum.parent_cols = s.parent_cols;
    sum.reduced_rows = s.reduced.rows();
    sum.reduced_cols = s.reduced.cols();
    sum.pivot_rows = s.pivot.rows();
    sum.pivot_cols = s.pivot.cols();
    sum.pivot_rank = s.pivot_rank;
    sum.pivot_sigma_min = s.pivot_sigma_min;
    sum.pivot_invertible = s.pivot_invertible;
    sum.marginal = s.marginal;
    sum.defect = s.defect();
    json js = to_json(sum);
    js["pivot"] = matrix_to_json<Scalar>(s.pivot);
    steps.push_back(js);
  }
  json j = header(any, tol);
  j["kind"] = std::string(to_string(kind));
  j["steps_requested"] = f.steps;
  j["steps_taken"] = steps_taken;
  j["reduced"] = pencil_to_json(reduced);
  j["domain_embedding"] = matrix_to_json<Scalar>(domain);
  j["codomain_embedding"] = matrix_to_json<Scalar>(codomain);
  j["steps"] = steps;
  j["warnings"] = warnings;

  if (!f.mtx_dir.empty()) {
    std::error_code ec;
    fs::create_directories(f.mtx_dir, ec);
    if (ec) {
      throw InputError("cannot create " + f.mtx_dir + ": " + ec.message());
    }
    const fs::path dir(f.mtx_dir);
    write_matrix_market<Scalar>(reduced.E(), dir / "E.mtx");
    write_matrix_market<Scalar>(reduced.A(), dir / "A.mtx");
    write_matrix_market<Scalar>(domain, dir / "domain.mtx");
    write_matrix_market<Scalar>(codomain, dir / "codomain.mtx");
  }

  std::ostringstream text;
  text << to_string(kind) << " reduction: " << steps_taken << " of " << f.steps << " steps, "
       << p.rows() << "x" << p.cols() << " -> " << reduced.rows() << "x" << reduced.cols() << "\n";
  f.out.emit(j, text.str(), out);
}

// --------------------------------------------------------------------------
// commute

template <class Scalar>
void commute_cmd(const Pencil<Scalar>& p, const AnyPencil& any, const InputFlags& in,
                 const OutputFlags& o, std::ostream& out) {
  const Tolerance tol = in.tolerance();
  const auto c = commute_check(p, tol);
  CommutativitySummary s;
  s.norm_JU = c.norm_JU;
  s.norm_JW = c.norm_JW;
  s.sigma_min_JU = c.sigma_min_JU;
  s.sigma_min_JW = c.sigma_min_JW;
  s.image_residual_JU = c.image_residual_JU;
  s.image_residual_JW = c.image_residual_JW;
  s.intertwine_residual_E = c.intertwine_residual_E;
  s.intertwine_residual_A = c.intertwine_residual_A;
  s.residual_bound = c.residual_bound;
  s.equivalent = c.equivalent;
  s.obs_pivot_invertible = c.obs_pivot_invertible;
  s.ctrl_obs_pivot_invertible = c.ctrl_obs_pivot_invertible;
  s.ctrl_pivot_invertible = c.ctrl_pivot_invertible;
  s.obs_ctrl_pivot_invertible = c.obs_ctrl_pivot_invertible;
  s.ctrl_pivot_kernel = c.ctrl_pivot_kernel;
  s.obs_ctrl_pivot_kernel = c.obs_ctrl_pivot_kernel;
  s.pivot_equivalences_hold = c.pivot_equivalences_hold;
  s.JU = matrix_to_json<Scalar>(c.JU);
  s.JW = matrix_to_json<Scalar>(c.JW);
  s.dimension_checks = interwoven_dimension_checks(p, tol);

  json j = header(any, tol);
  j["commutativity"] = to_json(s);
  std::ostringstream text;
  text << "commutativity " << (s.equivalent ? "equivalent" : "FAILED") << "\n"
       << "|J_U| " << s.norm_JU << ", |J_W| " << s.norm_JW << "\n"
       << "intertwining residuals E " << s.intertwine_residual_E << ", A "
       << s.intertwine_residual_A << " (bound " << s.residual_bound << ")\n"
       << "pivot equivalences " << (s.pivot_equivalences_hold ? "hold" : "FAIL") << "\n";
  o.emit(j, text.str(), out);
}

// --------------------------------------------------------------------------
// spectrum

struct SpectrumFlags {
  InputFlags in;
  OutputFlags out;
  std::string lambdas;
  std::string grid;
  std::string csv;
};

template <class Scalar>
void spectrum_cmd(const Pencil<Scalar>& p, const AnyPencil& any, const SpectrumFlags& f,
                  std::ostream& out) {
  const Tolerance tol = f.in.tolerance();
  std::vector<std::complex<double>> lambdas;
  if (!f.lambdas.empty()) {
    for (const auto& s : split(f.lambdas, ',')) {
      lambdas.push_back(parse_complex(s));
    }
  }
  if (!f.grid.empty()) {
    const auto g = parse_grid(f.grid);
    lambdas.insert(lambdas.end(), g.begin(), g.end());
  }
  if (f.lambdas.empty() && f.grid.empty()) {
    lambdas = sample_lambdas(p, AnalysisOptions{}.lambda_count, AnalysisOptions{}.lambda_seed, tol);
  }
  std::vector<ResolventSample> samples;
  for (const auto& l : lambdas) {
    samples.push_back(resolvent_member(p, l, tol));
  }
  const DefectProfile d = defect_profile(p, tol);

  json j = header(any, tol);
  json arr = json::array();
  for (const auto& s : samples) {
    arr.push_back(to_json(s));
  }
  j["resolvent_samples"] = arr;
  j["regular"] = d.regular;
  std::ostringstream text;
  std::size_t members = 0;
  for (const auto& s : samples) {
    members += s.member ? 1 : 0;
  }
  text << "resolvent samples " << members << "/" << samples.size() << " members\n";
  if (d.regular) {
    json spec = json::array();
    text << "core spectrum";
    for (const auto& z : core_spectrum(p, tol)) {
      spec.push_back(complex_to_json(z));
      text << " " << z.real();
      if (z.imag() != 0.0) {
        text << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
      }
    }
    text << "\n";
    j["core_spectrum"] = spec;
  } else {
    text << "pencil is not regular: the resolvent set is empty\n";
  }

  if (!f.csv.empty()) {
    std::ofstream csv(f.csv);
    if (!csv) {
      throw InputError("cannot write " + f.csv);
    }
    csv << "re,im,sigma_min,threshold,member\n";
    for (const auto& s : samples) {
      csv << canonical_dump(real_to_json(s.lambda.real())) << ','
          << canonical_dump(real_to_json(s.lambda.imag())) << ','
          << canonical_dump(real_to_json(s.sigma_min)) << ','
          << canonical_dump(real_to_json(s.threshold)) << ',' << (s.member ? 1 : 0) << "\n";
    }
    if (!csv) {
      throw InputError("cannot write " + f.csv);
    }
  }
  f.out.emit(j, text.str(), out);
}

// --------------------------------------------------------------------------
// saddle

struct SaddleFlags {
  std::string spec;
  bool infsup = false;
  std::string solve;
  bool ladder = false;
  double tol = Tolerance{}.rel;
  OutputFlags out;
};

Vector<double> load_rhs(const std::string& path) {
  json j = read_json_file(path);
  if (j.is_object()) {
    if (!j.contains("f")) {
      throw InputError(path + ": expected an array or an object with key \"f\"");
    }
    j = j.at("f");
  }
  if (!j.is_array()) {
    throw InputError(path + ": right-hand side must be an array of numbers");
  }
  Vector<double> f(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    f(static_cast<Index>(k)) = real_from_json(j[k]);
  }
  return f;
}

json vector_json(const Vector<double>& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) {
    out.push_back(real_to_json(v(k)));
  }
  return out;
}

void saddle_cmd(const SaddleFlags& f, std::ostream& out) {
  Tolerance tol;
  tol.rel = f.tol;
  tol.validate();
  const SaddleSpec spec = saddle_from_json(read_json_file(f.spec));
  const AnyPencil pencil = build_saddle_pencil(spec);
  json j = header(pencil, tol);
  j["nx"] = spec.nx();
  j["nm"] = spec.nm();
  std::ostringstream text;
  const bool infsup = f.infsup || (f.solve.empty() && !f.ladder);
  if (infsup) {
    const InfSupResult r = inf_sup_constant(spec, tol);
    j["saddle"] = to_json(r);
    text << "inf-sup beta " << r.beta << (r.satisfied ? " (satisfied)" : " (violated)") << "\n";
  }
  if (f.ladder) {
    const SaddleLadder l = saddle_reduction_ladder(spec, tol);
    j["saddle_ladder"] = json{{"ker_b", l.ker_b},
                              {"obs_domain", l.obs_domain},
                              {"obs_codomain", l.obs_codomain},
                              {"ker_e", l.ker_e},
                              {"a_ker_e", l.a_ker_e},
                              {"obs_ctrl_domain", l.obs_ctrl_domain},
                              {"obs_ctrl_codomain", l.obs_ctrl_codomain},
                              {"ctrl_domain", l.ctrl_domain},
                              {"ctrl_codomain", l.ctrl_codomain},
                              {"ctrl_obs_domain", l.ctrl_obs_domain},
                              {"ctrl_obs_codomain", l.ctrl_obs_codomain},
                              {"ker_b_basis", matrix_to_json<double>(l.ker_b_basis)},
                              {"consistent", l.consistent}};
    text << "ladder dim ker B " << l.ker_b << ", consistent " << (l.consistent ? "yes" : "no")
         << "\n";
  }
  if (!f.solve.empty()) {
    const SaddleSolveResult r = solve_saddle(spec, load_rhs(f.solve), tol);
    j["saddle_solve"] = json{{"invertible", r.invertible},
                             {"direct_invertible", r.direct_invertible},
                             {"inf_sup", r.inf_sup},
                             {"kernel_block_invertible", r.kernel_block_invertible},
                             {"verdicts_agree", r.verdicts_agree},
                             {"explanation", r.explanation},
                             {"x", vector_json(r.x)},
                             {"mu", vector_json(r.mu)},
                             {"residual", real_to_json(r.residual)}};
    text << "solve " << (r.invertible ? "ok" : "singular: " + r.explanation) << ", residual "
         << r.residual << "\n";
  }
  f.out.emit(j, text.str(), out);
}

// --------------------------------------------------------------------------
// synth

struct SynthFlags {
  std::string blocks;
  std::uint64_t seed = 0;
  bool scramble = false;
  std::string out_path;
};

void synth_cmd(const SynthFlags& f, std::ostream& out) {
  const BlockSpec spec = BlockSpec::parse(f.blocks);
  const bool complex = std::any_of(spec.blocks.begin(), spec.blocks.end(),
                                   [](const Block& b) { return b.eigenvalue.imag() != 0.0; });
  auto build = [&](auto tag) {
    using Scalar = decltype(tag);
    const Pencil<Scalar> p = f.scramble ? synthesize<Scalar>(spec, f.seed) : synthesize<Scalar>(spec);
    return pencil_to_json(p);
  };
  json j = complex ? build(std::complex<double>{}) : build(double{});
  j["blocks"] = spec.to_string();
  j["seed"] = f.seed;
  j["scrambled"] = f.scramble;
  j["regular"] = spec.is_regular();
  if (f.out_path.empty()) {
    out << canonical_dump(j) << "\n";
  } else {
    write_json_file(j, f.out_path);
  }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pencilkit: analysis of matrix pencils (E, A) by observation and control reductions",
               "pencilkit"};
  app.require_subcommand(1);

  AnalyzeFlags analyze_f;
  auto* analyze_cmd = app.add_subcommand("analyze", "full analysis report");
  analyze_f.in.add_to(*analyze_cmd);
  analyze_f.out.add_to(*analyze_cmd);
  analyze_cmd->add_option("--max-steps", analyze_f.max_steps, "chain length limit");
  analyze_cmd->add_option("--batch", analyze_f.batch_dir, "analyze every *.json in a directory");
  analyze_cmd->add_option("--jobs", analyze_f.jobs, "worker threads for --batch")
      ->check(CLI::Range(1u, 256u));

  ReduceFlags reduce_f;
  auto* reduce_sub = app.add_subcommand("reduce", "apply observation or control reductions");
  reduce_f.in.add_to(*reduce_sub);
  reduce_f.out.add_to(*reduce_sub);
  reduce_sub->add_option("--kind", reduce_f.kind, "obs or ctrl")
      ->check(CLI::IsMember({"obs", "ctrl"}))
      ->capture_default_str();
  reduce_sub->add_option("--steps", reduce_f.steps, "number of reductions")->capture_default_str();
  reduce_sub->add_option("--mtx-dir", reduce_f.mtx_dir, "also write Matrix Market files here");

  InputFlags commute_in;
  OutputFlags commute_out;
  auto* commute_sub = app.add_subcommand("commute", "commutativity certificate");
  commute_in.add_to(*commute_sub);
  commute_out.add_to(*commute_sub);

  SpectrumFlags spectrum_f;
  auto* spectrum_sub = app.add_subcommand("spectrum", "resolvent membership and core spectrum");
  spectrum_f.in.add_to(*spectrum_sub);
  spectrum_f.out.add_to(*spectrum_sub);
  spectrum_sub->add_option("--lambdas", spectrum_f.lambdas, "comma-separated, e.g. 0,1+2i,-3i");
  spectrum_sub->add_option("--grid", spectrum_f.grid, "re0:re1:nre,im0:im1:nim");
  spectrum_sub->add_option("--csv", spectrum_f.csv, "write the samples as CSV");

  SaddleFlags saddle_f;
  auto* saddle_sub = app.add_subcommand("saddle", "saddle-point pencils");
  saddle_sub->add_option("--spec", saddle_f.spec, "saddle spec JSON")->required();
  saddle_sub->add_flag("--infsup", saddle_f.infsup, "inf-sup constant (default)");
  saddle_sub->add_option("--solve", saddle_f.solve, "right-hand side JSON");
  saddle_sub->add_flag("--ladder", saddle_f.ladder, "dimensions along the reductions");
  saddle_sub->add_option("--tol", saddle_f.tol, "relative rank tolerance")->capture_default_str();
  saddle_f.out.add_to(*saddle_sub);

  SynthFlags synth_f;
  auto* synth_sub = app.add_subcommand("synth", "pencil from Kronecker blocks");
  synth_sub->add_option("--blocks", synth_f.blocks, "e.g. J(2,1.5),N(3),L(2),LT(1)")->required();
  synth_sub->add_option("--seed", synth_f.seed, "scrambling seed")->capture_default_str();
  synth_sub->add_flag("--scramble", synth_f.scramble, "apply a random equivalence");
  synth_sub->add_option("--out", synth_f.out_path, "output pencil JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  }

  if (analyze_cmd->parsed() && !analyze_f.batch_dir.empty()) {
    return run_batch(analyze_f, out, err);
  }
  return guarded(err, "", [&] {
    if (analyze_cmd->parsed()) {
      analyze_one(analyze_f.in.load(), analyze_f, out);
    } else if (reduce_sub->parsed()) {
      const AnyPencil p = reduce_f.in.load();
      std::visit([&](const auto& q) { reduce_cmd(q, p, reduce_f, out, err); }, p);
    } else if (commute_sub->parsed()) {
      const AnyPencil p = commute_in.load();
      std::visit([&](const auto& q) { commute_cmd(q, p, commute_in, commute_out, out); }, p);
    } else if (spectrum_sub->parsed()) {
      const AnyPencil p = spectrum_f.in.load();
      std::visit([&](const auto& q) { spectrum_cmd(q, p, spectrum_f, out); }, p);
    } else if (saddle_sub->parsed()) {
      saddle_cmd(saddle_f, out);
    } else if (synth_sub->parsed()) {
      synth_cmd(synth_f, out);
    }
  });
}

} // namespace pencilkit::cli
