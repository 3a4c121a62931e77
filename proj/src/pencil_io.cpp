#include "pencilkit/pencil_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace pencilkit {

namespace fs = std::filesystem;

json real_to_json(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  return x;
}

double real_from_json(const json& j) {
  if (j.is_number()) {
    return j.get<double>();
  }
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
      return -std::numeric_limits<double>::infinity();
    }
    if (s == "nan") {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
  throw InputError("expected a number, got " + j.dump());
}

template <class Scalar>
json matrix_to_json(const Matrix<Scalar>& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<Scalar, double>) {
        row.push_back(real_to_json(m(i, j)));
      } else {
        row.push_back(json::array({real_to_json(m(i, j).real()), real_to_json(m(i, j).imag())}));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

bool json_matrix_is_complex(const json& j) {
  if (!j.is_array()) {
    return false;
  }
  for (const auto& row : j) {
    if (!row.is_array()) {
      continue;
    }
    for (const auto& x : row) {
      if (x.is_array()) {
        return true;
      }
    }
  }
  return false;
}

template <class Scalar>
Matrix<Scalar> matrix_from_json(const json& j, Index rows, Index cols, std::string_view what) {
  const std::string name(what);
  if (!j.is_array()) {
    throw InputError(name + ": expected an array of rows");
  }
  // Zero-sized matrices may be written as [] regardless of the other dimension.
  if (rows == 0 || cols == 0) {
    if (!j.empty() && static_cast<Index>(j.size()) != rows) {
      throw InputError(name + ": expected " + std::to_string(rows) + " rows");
    }
    return Matrix<Scalar>(rows, cols);
  }
  if (static_cast<Index>(j.size()) != rows) {
    throw InputError(name + ": expected " + std::to_string(rows) + " rows, found " +
                     std::to_string(j.size()));
  }
  Matrix<Scalar> m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw InputError(name + ": row " + std::to_string(i) + " does not have " +
                       std::to_string(cols) + " entries");
    }
    for (Index k = 0; k < cols; ++k) {
      const json& x = row[static_cast<std::size_t>(k)];
      if (x.is_array()) {
        if (x.size() != 2) {
          throw InputError(name + ": complex entries must be [re, im] pairs");
        }
        const double re = real_from_json(x[0]);
        const double im = real_from_json(x[1]);
        if constexpr (std::is_same_v<Scalar, double>) {
          if (im != 0.0) {
            throw InputError(name + ": complex entry in a real matrix");
          }
          m(i, k) = re;
        } else {
          m(i, k) = Scalar(re, im);
        }
      } else {
        m(i, k) = Scalar(real_from_json(x));
      }
    }
  }
  return m;
}

template <class Scalar>
json pencil_to_json(const Pencil<Scalar>& p) {
  return json{{"schema_version", 1},
              {"m", p.rows()},
              {"n", p.cols()},
              {"field", std::string(to_string(p.field()))},
              {"E", matrix_to_json<Scalar>(p.E())},
              {"A", matrix_to_json<Scalar>(p.A())}};
}

AnyPencil pencil_from_json(const json& j) {
  if (!j.is_object()) {
    throw InputError("pencil JSON: top level must be an object");
  }
  if (j.contains("schema_version") && j.at("schema_version") != 1) {
    throw InputError("pencil JSON: unsupported schema_version " + j.at("schema_version").dump());
  }
  for (const char* key : {"m", "n", "E", "A"}) {
    if (!j.contains(key)) {
      throw InputError(std::string("pencil JSON: missing key '") + key + "'");
    }
  }
  if (!j.at("m").is_number_integer() || !j.at("n").is_number_integer() ||
      j.at("m").get<long long>() < 0 || j.at("n").get<long long>() < 0) {
    throw InputError("pencil JSON: m and n must be nonnegative integers");
  }
  const Index m = j.at("m").get<Index>();
  const Index n = j.at("n").get<Index>();
  bool complex = json_matrix_is_complex(j.at("E")) || json_matrix_is_complex(j.at("A"));
  if (j.contains("field")) {
    const json& field = j.at("field");
    const std::string f = field.is_string() ? field.get<std::string>() : "";
    if (f == "complex") {
      complex = true;
    } else if (f != "real") {
      throw InputError("pencil JSON: field must be \"real\" or \"complex\"");
    } else if (complex) {
      throw InputError("pencil JSON: field is \"real\" but entries are complex");
    }
  }
  if (complex) {
    using S = std::complex<double>;
    return ComplexPencil(matrix_from_json<S>(j.at("E"), m, n, "E"),
                         matrix_from_json<S>(j.at("A"), m, n, "A"));
  }
  return RealPencil(matrix_from_json<double>(j.at("E"), m, n, "E"),
                    matrix_from_json<double>(j.at("A"), m, n, "A"));
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

AnyPencil load_pencil_json(const fs::path& path) {
  const json j = read_json_file(path);
  try {
    return pencil_from_json(j);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  out << canonical_dump(j) << '\n';
  if (!out) {
    throw InputError("write failed for " + path.string());
  }
}

void save_pencil_json(const AnyPencil& p, const fs::path& path) {
  std::visit([&](const auto& pencil) { write_json_file(pencil_to_json(pencil), path); }, p);
}

// ---------------------------------------------------------------------------
// Matrix Market

namespace {

std::string lower(std::string s) {
  for (auto& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

std::string format_float(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace

MatrixMarketData read_matrix_market(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  const auto fail = [&](const std::string& msg) {
    return InputError(path.string() + ": " + msg);
  };
  std::string line;
  if (!std::getline(in, line)) {
    throw fail("empty file");
  }
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix") {
    throw fail("missing %%MatrixMarket matrix header");
  }
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (format != "array" && format != "coordinate") {
    throw fail("unsupported format '" + format + "'");
  }
  if (field != "real" && field != "integer" && field != "double" && field != "complex") {
    throw fail("unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric" &&
      symmetry != "hermitian") {
    throw fail("unsupported symmetry '" + symmetry + "'");
  }
  const bool is_complex = field == "complex";
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%' && line.find_first_not_of(" \t\r") != std::string::npos) {
      break;
    }
  }
  std::istringstream size_line(line);
  long long rows = -1, cols = -1, nnz = -1;
  size_line >> rows >> cols;
  if (format == "coordinate") {
    size_line >> nnz;
  }
  if (!size_line || rows < 0 || cols < 0 || (format == "coordinate" && nnz < 0)) {
    throw fail("malformed size line '" + line + "'");
  }
  MatrixMarketData out;
  out.is_complex = is_complex;
  out.values = ComplexMatrix::Zero(rows, cols);
  const auto read_value = [&](std::istream& s) {
    double re = 0.0, im = 0.0;
    if (!(s >> re)) {
      throw fail("truncated or malformed entry");
    }
    if (is_complex && !(s >> im)) {
      throw fail("complex entry without imaginary part");
    }
    return std::complex<double>(re, im);
  };
  const auto mirror = [&](long long i, long long j, std::complex<double> v) {
    if (i == j) {
      return;
    }
    if (symmetry == "symmetric") {
      out.values(j, i) = v;
    } else if (symmetry == "skew-symmetric") {
      out.values(j, i) = -v;
    } else if (symmetry == "hermitian") {
      out.values(j, i) = std::conj(v);
    }
  };
  if (format == "array") {
    // Column-major; symmetric variants store the lower triangle only.
    for (long long j = 0; j < cols; ++j) {
      const long long first = symmetry == "general" ? 0 : (symmetry == "skew-symmetric" ? j + 1 : j);
      for (long long i = first; i < rows; ++i) {
        const auto v = read_value(in);
        out.values(i, j) = v;
        mirror(i, j, v);
      }
    }
  } else {
    for (long long k = 0; k < nnz; ++k) {
      long long i = 0, j = 0;
      if (!(in >> i >> j)) {
        throw fail("truncated coordinate entry " + std::to_string(k));
      }
      if (i < 1 || i > rows || j < 1 || j > cols) {
        throw fail("coordinate entry out of range");
      }
      const auto v = read_value(in);
      out.values(i - 1, j - 1) += v;
      mirror(i - 1, j - 1, v);
    }
  }
  if (!out.values.allFinite()) {
    throw fail("non-finite entries");
  }
  return out;
}

template <class Scalar>
void write_matrix_market(const Matrix<Scalar>& m, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  constexpr bool cplx = !std::is_same_v<Scalar, double>;
  out << "%%MatrixMarket matrix array " << (cplx ? "complex" : "real") << " general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if constexpr (cplx) {
        out << format_float(m(i, j).real()) << ' ' << format_float(m(i, j).imag()) << '\n';
      } else {
        out << format_float(m(i, j)) << '\n';
      }
    }
  }
  if (!out) {
    throw InputError("write failed for " + path.string());
  }
}

AnyPencil load_pencil_matrix_market(const fs::path& path_e, const fs::path& path_a) {
  const MatrixMarketData e = read_matrix_market(path_e);
  const MatrixMarketData a = read_matrix_market(path_a);
  if (e.values.rows() != a.values.rows() || e.values.cols() != a.values.cols()) {
    throw InputError("Matrix Market pencil: E is " + std::to_string(e.values.rows()) + "x" +
                     std::to_string(e.values.cols()) + " but A is " +
                     std::to_string(a.values.rows()) + "x" + std::to_string(a.values.cols()));
  }
  if (e.is_complex || a.is_complex) {
    return ComplexPencil(e.values, a.values);
  }
  return RealPencil(e.values.real(), a.values.real());
}

// ---------------------------------------------------------------------------
// Digest

namespace {

void append_u64(std::vector<unsigned char>& buf, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) {
    buf.push_back(static_cast<unsigned char>((v >> (8 * k)) & 0xffu));
  }
}

void append_double(std::vector<unsigned char>& buf, double x) {
  append_u64(buf, std::bit_cast<std::uint64_t>(x));
}

template <class Scalar>
void append_matrix(std::vector<unsigned char>& buf, const Matrix<Scalar>& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if constexpr (std::is_same_v<Scalar, double>) {
        append_double(buf, m(i, j));
      } else {
        append_double(buf, m(i, j).real());
        append_double(buf, m(i, j).imag());
      }
    }
  }
}

} // namespace

std::string input_digest(const AnyPencil& p) {
  std::vector<unsigned char> buf;
  std::visit(
      [&](const auto& pencil) {
        const std::string tag = "pencilkit-digest-1:" + std::string(to_string(pencil.field()));
        buf.insert(buf.end(), tag.begin(), tag.end());
        append_u64(buf, static_cast<std::uint64_t>(pencil.rows()));
        append_u64(buf, static_cast<std::uint64_t>(pencil.cols()));
        append_matrix(buf, pencil.E());
        append_matrix(buf, pencil.A());
      },
      p);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(buf.data(), buf.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("input_digest: SHA-256 failed");
  }
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
  }
  return hex.str();
}

// ---------------------------------------------------------------------------
// Canonical JSON

namespace {

bool is_scalar(const json& j) {
  return !j.is_array() && !j.is_object();
}

bool is_inline_array(const json& j) {
  for (const auto& x : j) {
    if (x.is_object()) {
      return false;
    }
    if (x.is_array()) {
      for (const auto& y : x) {
        if (!is_scalar(y)) {
          return false;
        }
      }
    }
  }
  return true;
}

void dump_scalar(const json& j, std::string& out) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) {
      out += "null";
      return;
    }
    std::string s = format_float(x);
    if (s.find_first_of(".eEn") == std::string::npos) {
      s += ".0";
    }
    out += s;
  } else {
    out += j.dump();
  }
}

void dump_inline(const json& j, std::string& out) {
  if (!j.is_array()) {
    dump_scalar(j, out);
    return;
  }
  out += '[';
  bool first = true;
  for (const auto& x : j) {
    if (!first) {
      out += ", ";
    }
    first = false;
    dump_inline(x, out);
  }
  out += ']';
}

void dump(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) {
        out += ",\n";
      }
      first = false;
      out += pad;
      out += json(it.key()).dump();
      out += ": ";
      dump(it.value(), out, indent + 2);
    }
    out += "\n" + close + "}";
  } else if (j.is_array()) {
    if (j.empty() || is_inline_array(j)) {
      dump_inline(j, out);
      return;
    }
    out += "[\n";
    bool first = true;
    for (const auto& x : j) {
      if (!first) {
        out += ",\n";
      }
      first = false;
      out += pad;
      dump(x, out, indent + 2);
    }
    out += "\n" + close + "]";
  } else {
    dump_scalar(j, out);
  }
}

} // namespace

std::string canonical_dump(const json& j) {
  std::string out;
  dump(j, out, 0);
  return out;
}

#define PENCILKIT_INSTANTIATE(S)                                                          \
  template json matrix_to_json<S>(const Matrix<S>&);                                      \
  template Matrix<S> matrix_from_json<S>(const json&, Index, Index, std::string_view);    \
  template json pencil_to_json<S>(const Pencil<S>&);                                      \
  template void write_matrix_market<S>(const Matrix<S>&, const fs::path&);

PENCILKIT_INSTANTIATE(double)
PENCILKIT_INSTANTIATE(std::complex<double>)

#undef PENCILKIT_INSTANTIATE

} // namespace pencilkit
