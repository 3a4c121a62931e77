#include "pencilkit/report.hpp"

#include <cmath>
#include <sstream>

#include "pencilkit/errors.hpp"
#include "pencilkit/pencil_io.hpp"

namespace pencilkit {

namespace {

template <class Scalar>
StepSummary summarize_step(const ReductionStep<Scalar>& s) {
  StepSummary out;
  out.kind = s.kind;
  out.parent_rows = s.parent_rows;
  out.parent_cols = s.parent_cols;
  out.reduced_rows = s.reduced.rows();
  out.reduced_cols = s.reduced.cols();
  out.pivot_rows = s.pivot.rows();
  out.pivot_cols = s.pivot.cols();
  out.pivot_rank = s.pivot_rank;
  out.pivot_sigma_min = s.pivot_sigma_min;
  out.pivot_invertible = s.pivot_invertible;
  out.marginal = s.marginal;
  out.defect = s.defect();
  return out;
}

template <class Scalar>
CommutativitySummary summarize_commutativity(const Pencil<Scalar>& p, const Tolerance& tol) {
  const auto c = commute_check(p, tol);
  CommutativitySummary out;
  out.norm_JU = c.norm_JU;
  out.norm_JW = c.norm_JW;
  out.sigma_min_JU = c.sigma_min_JU;
  out.sigma_min_JW = c.sigma_min_JW;
  out.image_residual_JU = c.image_residual_JU;
  out.image_residual_JW = c.image_residual_JW;
  out.intertwine_residual_E = c.intertwine_residual_E;
  out.intertwine_residual_A = c.intertwine_residual_A;
  out.residual_bound = c.residual_bound;
  out.equivalent = c.equivalent;
  out.obs_pivot_invertible = c.obs_pivot_invertible;
  out.ctrl_obs_pivot_invertible = c.ctrl_obs_pivot_invertible;
  out.ctrl_pivot_invertible = c.ctrl_pivot_invertible;
  out.obs_ctrl_pivot_invertible = c.obs_ctrl_pivot_invertible;
  out.ctrl_pivot_kernel = c.ctrl_pivot_kernel;
  out.obs_ctrl_pivot_kernel = c.obs_ctrl_pivot_kernel;
  out.pivot_equivalences_hold = c.pivot_equivalences_hold;
  out.JU = matrix_to_json<Scalar>(c.JU);
  out.JW = matrix_to_json<Scalar>(c.JW);
  out.dimension_checks = interwoven_dimension_checks(p, tol);
  return out;
}

template <class Scalar>
AnalysisReport analyze_impl(const Pencil<Scalar>& p, const AnyPencil& any,
                            const AnalysisOptions& opt) {
  const Tolerance& tol = opt.tol;
  tol.validate();
  AnalysisReport r;
  r.input_digest = input_digest(any);
  r.field = p.field();
  r.rows = p.rows();
  r.cols = p.cols();
  r.tolerance = tol;

  r.defects = defect_profile(p, tol, opt.max_steps);
  const auto chain = reduce_to_core(p, tol, opt.max_steps);
  for (const auto& s : chain.steps) {
    r.chain.push_back(summarize_step(s));
  }
  r.chain_exhausted = chain.exhausted;

  r.normality = normality_check(p, tol);
  r.index_one = control_index_one(p, tol);
  r.commutativity = summarize_commutativity(p, tol);

  auto lambdas = sample_lambdas(p, opt.lambda_count, opt.lambda_seed, tol);
  lambdas.insert(lambdas.end(), opt.lambdas.begin(), opt.lambdas.end());
  for (const auto& lambda : lambdas) {
    r.resolvent_samples.push_back(resolvent_member(p, lambda, tol));
  }

  if (r.defects.regular) {
    r.core_spectrum = core_spectrum(p, tol);
    const auto ode = reduce_to_ode(p, tol, opt.max_steps);
    OdeSummary s;
    s.core_dim = ode.ode_matrix.rows();
    s.ode_matrix = matrix_to_json<Scalar>(ode.ode_matrix);
    for (const auto& layer : ode.constraints) {
      s.layer_sizes.push_back(layer.eliminated.cols());
      s.layer_pivot_sigma_min.push_back(layer.pivot_sigma_min);
    }
    r.ode_extract = std::move(s);
  }

  if (p.is_zero_shaped() && !(p.rows() == 0 && p.cols() == 0)) {
    r.warnings.push_back("zero-shaped pencil");
  }
  if (p.rows() == 0 && p.cols() == 0) {
    r.warnings.push_back("empty pencil");
  }
  for (const auto& m : r.defects.marginal) {
    r.warnings.push_back("marginal pivot: " + m);
  }
  if (r.defects.termination == Termination::max_steps) {
    r.warnings.push_back("chain stopped at max-steps before irreducibility");
  }
  if (!r.defects.regular) {
    r.warnings.push_back("pencil is not regular");
  }
  if (!r.normality.normal) {
    r.warnings.push_back("normality gaps exceed tolerance");
  }
  if (!r.commutativity.equivalent) {
    r.warnings.push_back("commutativity certificate failed");
  }
  return r;
}

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("report: missing key \"") + key + "\"");
  }
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return need(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("report: bad value for \"") + key + "\": " + e.what());
  }
}

double get_real(const json& j, const char* key) {
  return real_from_json(need(j, key));
}

ReductionKind kind_from_string(const std::string& s) {
  if (s == "observation") {
    return ReductionKind::observation;
  }
  if (s == "control") {
    return ReductionKind::control;
  }
  throw InputError("report: unknown reduction kind \"" + s + "\"");
}

std::vector<double> reals_from_json(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) {
    out.push_back(real_from_json(x));
  }
  return out;
}

json reals_to_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) {
    out.push_back(real_to_json(x));
  }
  return out;
}

} // namespace

AnalysisReport analyze(const AnyPencil& p, const AnalysisOptions& opt) {
  return std::visit([&](const auto& q) { return analyze_impl(q, p, opt); }, p);
}

json complex_to_json(std::complex<double> z) {
  return json::array({real_to_json(z.real()), real_to_json(z.imag())});
}

std::complex<double> complex_from_json(const json& j) {
  if (j.is_array() && j.size() == 2) {
    return {real_from_json(j[0]), real_from_json(j[1])};
  }
  return {real_from_json(j), 0.0};
}

json to_json(const DefectProfile& d) {
  return json{{"alpha", d.alpha},
              {"beta_obs", d.beta_obs},
              {"beta_ctrl", d.beta_ctrl},
              {"steps_obs", d.steps_obs},
              {"steps_ctrl", d.steps_ctrl},
              {"regular", d.regular},
              {"termination", std::string(to_string(d.termination))},
              {"marginal", d.marginal}};
}

json to_json(const NormalityDiagnostics& n) {
  return json{{"sum_gap", real_to_json(n.sum_gap)},
              {"int_gap", real_to_json(n.int_gap)},
              {"normal", n.normal}};
}

json to_json(const CommutativitySummary& c) {
  json checks = json::array();
  for (const auto& d : c.dimension_checks) {
    checks.push_back(json{{"name", d.name}, {"defect", d.defect}});
  }
  return json{{"norm_JU", real_to_json(c.norm_JU)},
              {"norm_JW", real_to_json(c.norm_JW)},
              {"sigma_min_JU", real_to_json(c.sigma_min_JU)},
              {"sigma_min_JW", real_to_json(c.sigma_min_JW)},
              {"image_residual_JU", real_to_json(c.image_residual_JU)},
              {"image_residual_JW", real_to_json(c.image_residual_JW)},
              {"intertwine_residual_E", real_to_json(c.intertwine_residual_E)},
              {"intertwine_residual_A", real_to_json(c.intertwine_residual_A)},
              {"residual_bound", real_to_json(c.residual_bound)},
              {"equivalent", c.equivalent},
              {"obs_pivot_invertible", c.obs_pivot_invertible},
              {"ctrl_obs_pivot_invertible", c.ctrl_obs_pivot_invertible},
              {"ctrl_pivot_invertible", c.ctrl_pivot_invertible},
              {"obs_ctrl_pivot_invertible", c.obs_ctrl_pivot_invertible},
              {"ctrl_pivot_kernel", c.ctrl_pivot_kernel},
              {"obs_ctrl_pivot_kernel", c.obs_ctrl_pivot_kernel},
              {"pivot_equivalences_hold", c.pivot_equivalences_hold},
              {"JU", c.JU},
              {"JW", c.JW},
              {"dimension_checks", checks}};
}

json to_json(const ResolventSample& s) {
  return json{{"lambda", complex_to_json(s.lambda)},
              {"sigma_min", real_to_json(s.sigma_min)},
              {"threshold", real_to_json(s.threshold)},
              {"member", s.member},
              {"reason", s.reason}};
}

json to_json(const InfSupResult& s) {
  return json{{"beta", real_to_json(s.beta)},
              {"threshold", real_to_json(s.threshold)},
              {"satisfied", s.satisfied},
              {"pivot_sigma_min_obs", real_to_json(s.pivot_sigma_min_obs)},
              {"pivot_sigma_min_ctrl", real_to_json(s.pivot_sigma_min_ctrl)}};
}

json to_json(const StepSummary& s) {
  return json{{"kind", std::string(to_string(s.kind))},
              {"parent_shape", {s.parent_rows, s.parent_cols}},
              {"reduced_shape", {s.reduced_rows, s.reduced_cols}},
              {"pivot_shape", {s.pivot_rows, s.pivot_cols}},
              {"pivot_rank", s.pivot_rank},
              {"pivot_sigma_min", real_to_json(s.pivot_sigma_min)},
              {"pivot_invertible", s.pivot_invertible},
              {"marginal", s.marginal},
              {"defect", s.defect}};
}

json to_json(const AnalysisReport& r) {
  if (r.input_digest.empty()) {
    return json{{"schema_version", r.schema_version}};
  }
  json steps = json::array();
  for (const auto& s : r.chain) {
    steps.push_back(to_json(s));
  }
  json samples = json::array();
  for (const auto& s : r.resolvent_samples) {
    samples.push_back(to_json(s));
  }
  json j{{"schema_version", r.schema_version},
         {"input_digest", r.input_digest},
         {"field", std::string(to_string(r.field))},
         {"shape", {r.rows, r.cols}},
         {"tolerance", {{"rel", real_to_json(r.tolerance.rel)},
                        {"abs_floor", real_to_json(r.tolerance.abs_floor)}}},
         {"chain", {{"steps", steps}, {"exhausted", r.chain_exhausted}}},
         {"defects", to_json(r.defects)},
         {"normality", to_json(r.normality)},
         {"index_one", {{"index_one", r.index_one.index_one},
                        {"intersection_dim", r.index_one.intersection_dim},
                        {"reduced_e_injective", r.index_one.reduced_e_injective}}},
         {"commutativity", to_json(r.commutativity)},
         {"resolvent_samples", samples},
         {"warnings", r.warnings}};
  if (r.core_spectrum) {
    json spec = json::array();
    for (const auto& z : *r.core_spectrum) {
      spec.push_back(complex_to_json(z));
    }
    j["core_spectrum"] = spec;
  }
  if (r.ode_extract) {
    j["ode_extract"] = json{{"core_dim", r.ode_extract->core_dim},
                            {"ode_matrix", r.ode_extract->ode_matrix},
                            {"layer_sizes", r.ode_extract->layer_sizes},
                            {"layer_pivot_sigma_min",
                             reals_to_json(r.ode_extract->layer_pivot_sigma_min)}};
  }
  if (r.saddle) {
    j["saddle"] = to_json(*r.saddle);
  }
  return j;
}

AnalysisReport report_from_json(const json& j) {
  AnalysisReport r;
  r.schema_version = get<int>(j, "schema_version");
  if (r.schema_version != kReportSchemaVersion) {
    throw InputError("report: unsupported schema_version " + std::to_string(r.schema_version));
  }
  if (!j.contains("input_digest")) {
    return r;
  }
  try {
    r.input_digest = get<std::string>(j, "input_digest");
    const auto field = get<std::string>(j, "field");
    if (field != "real" && field != "complex") {
      throw InputError("report: unknown field \"" + field + "\"");
    }
    r.field = field == "real" ? Field::real : Field::complex;
    const auto& shape = need(j, "shape");
    r.rows = shape.at(0).get<Index>();
    r.cols = shape.at(1).get<Index>();
    const auto& tol = need(j, "tolerance");
    r.tolerance.rel = get_real(tol, "rel");
    r.tolerance.abs_floor = get_real(tol, "abs_floor");

    const auto& chain = need(j, "chain");
    r.chain_exhausted = get<bool>(chain, "exhausted");
    for (const auto& s : need(chain, "steps")) {
      StepSummary st;
      st.kind = kind_from_string(get<std::string>(s, "kind"));
      st.parent_rows = need(s, "parent_shape").at(0).get<Index>();
      st.parent_cols = need(s, "parent_shape").at(1).get<Index>();
      st.reduced_rows = need(s, "reduced_shape").at(0).get<Index>();
      st.reduced_cols = need(s, "reduced_shape").at(1).get<Index>();
      st.pivot_rows = need(s, "pivot_shape").at(0).get<Index>();
      st.pivot_cols = need(s, "pivot_shape").at(1).get<Index>();
      st.pivot_rank = get<Index>(s, "pivot_rank");
      st.pivot_sigma_min = get_real(s, "pivot_sigma_min");
      st.pivot_invertible = get<bool>(s, "pivot_invertible");
      st.marginal = get<bool>(s, "marginal");
      st.defect = get<Index>(s, "defect");
      r.chain.push_back(st);
    }

    const auto& d = need(j, "defects");
    r.defects.alpha = get<std::vector<Index>>(d, "alpha");
    r.defects.beta_obs = get<std::vector<Index>>(d, "beta_obs");
    r.defects.beta_ctrl = get<std::vector<Index>>(d, "beta_ctrl");
    r.defects.steps_obs = get<Index>(d, "steps_obs");
    r.defects.steps_ctrl = get<Index>(d, "steps_ctrl");
    r.defects.regular = get<bool>(d, "regular");
    r.defects.termination = get<std::string>(d, "termination") == "max_steps"
                                ? Termination::max_steps
                                : Termination::exhausted;
    r.defects.marginal = get<std::vector<std::string>>(d, "marginal");

    const auto& n = need(j, "normality");
    r.normality.sum_gap = get_real(n, "sum_gap");
    r.normality.int_gap = get_real(n, "int_gap");
    r.normality.normal = get<bool>(n, "normal");

    const auto& io = need(j, "index_one");
    r.index_one.index_one = get<bool>(io, "index_one");
    r.index_one.intersection_dim = get<Index>(io, "intersection_dim");
    r.index_one.reduced_e_injective = get<bool>(io, "reduced_e_injective");

    const auto& c = need(j, "commutativity");
    auto& cs = r.commutativity;
    cs.norm_JU = get_real(c, "norm_JU");
    cs.norm_JW = get_real(c, "norm_JW");
    cs.sigma_min_JU = get_real(c, "sigma_min_JU");
    cs.sigma_min_JW = get_real(c, "sigma_min_JW");
    cs.image_residual_JU = get_real(c, "image_residual_JU");
    cs.image_residual_JW = get_real(c, "image_residual_JW");
    cs.intertwine_residual_E = get_real(c, "intertwine_residual_E");
    cs.intertwine_residual_A = get_real(c, "intertwine_residual_A");
    cs.residual_bound = get_real(c, "residual_bound");
    cs.equivalent = get<bool>(c, "equivalent");
    cs.obs_pivot_invertible = get<bool>(c, "obs_pivot_invertible");
    cs.ctrl_obs_pivot_invertible = get<bool>(c, "ctrl_obs_pivot_invertible");
    cs.ctrl_pivot_invertible = get<bool>(c, "ctrl_pivot_invertible");
    cs.obs_ctrl_pivot_invertible = get<bool>(c, "obs_ctrl_pivot_invertible");
    cs.ctrl_pivot_kernel = get<Index>(c, "ctrl_pivot_kernel");
    cs.obs_ctrl_pivot_kernel = get<Index>(c, "obs_ctrl_pivot_kernel");
    cs.pivot_equivalences_hold = get<bool>(c, "pivot_equivalences_hold");
    cs.JU = need(c, "JU");
    cs.JW = need(c, "JW");
    for (const auto& x : need(c, "dimension_checks")) {
      cs.dimension_checks.push_back({get<std::string>(x, "name"), get<long long>(x, "defect")});
    }

    for (const auto& s : need(j, "resolvent_samples")) {
      ResolventSample rs;
      rs.lambda = complex_from_json(need(s, "lambda"));
      rs.sigma_min = get_real(s, "sigma_min");
      rs.threshold = get_real(s, "threshold");
      rs.member = get<bool>(s, "member");
      rs.reason = get<std::string>(s, "reason");
      r.resolvent_samples.push_back(rs);
    }
    r.warnings = get<std::vector<std::string>>(j, "warnings");

    if (j.contains("core_spectrum")) {
      std::vector<std::complex<double>> spec;
      for (const auto& z : j.at("core_spectrum")) {
        spec.push_back(complex_from_json(z));
      }
      r.core_spectrum = std::move(spec);
    }
    if (j.contains("ode_extract")) {
      const auto& o = j.at("ode_extract");
      OdeSummary s;
      s.core_dim = get<Index>(o, "core_dim");
      s.ode_matrix = need(o, "ode_matrix");
      s.layer_sizes = get<std::vector<Index>>(o, "layer_sizes");
      s.layer_pivot_sigma_min = reals_from_json(need(o, "layer_pivot_sigma_min"));
      r.ode_extract = std::move(s);
    }
    if (j.contains("saddle")) {
      const auto& s = j.at("saddle");
      InfSupResult is;
      is.beta = get_real(s, "beta");
      is.threshold = get_real(s, "threshold");
      is.satisfied = get<bool>(s, "satisfied");
      is.pivot_sigma_min_obs = get_real(s, "pivot_sigma_min_obs");
      is.pivot_sigma_min_ctrl = get_real(s, "pivot_sigma_min_ctrl");
      r.saddle = is;
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("report: ") + e.what());
  }
  return r;
}

void save_report(const AnalysisReport& r, const std::filesystem::path& path) {
  write_json_file(to_json(r), path);
}

AnalysisReport load_report(const std::filesystem::path& path) {
  return report_from_json(read_json_file(path));
}

namespace {

std::string join(const std::vector<Index>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += (i ? "," : "") + std::to_string(v[i]);
  }
  return s + ")";
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string fmt(std::complex<double> z) {
  if (z.imag() == 0.0) {
    return fmt(z.real());
  }
  return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
}

} // namespace

std::string text_summary(const AnalysisReport& r) {
  std::ostringstream os;
  os << "pencil " << r.rows << "x" << r.cols << " (" << to_string(r.field) << ")\n";
  os << "digest " << r.input_digest << "\n";
  os << "tolerance rel=" << fmt(r.tolerance.rel) << " abs_floor=" << fmt(r.tolerance.abs_floor)
     << "\n";
  os << "alpha " << join(r.defects.alpha) << "\n";
  os << "beta_obs " << join(r.defects.beta_obs) << "\n";
  os << "beta_ctrl " << join(r.defects.beta_ctrl) << "\n";
  os << "regular " << (r.defects.regular ? "yes" : "no") << "\n";
  os << "core chain";
  if (r.chain.empty()) {
    os << " (already irreducible)";
  }
  for (const auto& s : r.chain) {
    os << " " << (s.kind == ReductionKind::observation ? "obs" : "ctrl") << "->" << s.reduced_rows
       << "x" << s.reduced_cols;
  }
  os << "\n";
  os << "normal " << (r.normality.normal ? "yes" : "no") << ", control index one "
     << (r.index_one.index_one ? "yes" : "no") << "\n";
  os << "commutativity " << (r.commutativity.equivalent ? "equivalent" : "FAILED")
     << " |J_U|=" << fmt(r.commutativity.norm_JU) << " |J_W|=" << fmt(r.commutativity.norm_JW)
     << "\n";
  std::size_t members = 0;
  for (const auto& s : r.resolvent_samples) {
    members += s.member ? 1 : 0;
  }
  os << "resolvent samples " << members << "/" << r.resolvent_samples.size() << " members\n";
  if (r.core_spectrum) {
    os << "core spectrum";
    if (r.core_spectrum->empty()) {
      os << " (empty)";
    }
    for (const auto& z : *r.core_spectrum) {
      os << " " << fmt(z);
    }
    os << "\n";
  }
  if (r.saddle) {
    os << "inf-sup beta " << fmt(r.saddle->beta) << (r.saddle->satisfied ? " (satisfied)" : " (violated)")
       << "\n";
  }
  for (const auto& w : r.warnings) {
    os << "warning: " << w << "\n";
  }
  return os.str();
}

} // namespace pencilkit
