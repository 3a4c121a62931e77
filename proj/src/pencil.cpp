#include "pencilkit/pencil.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <random>

namespace pencilkit {

std::string_view to_string(Field f) {
  return f == Field::real ? "real" : "complex";
}

template <class Scalar>
Pencil<Scalar>::Pencil(MatrixType e, MatrixType a) : e_(std::move(e)), a_(std::move(a)) {
  if (e_.rows() != a_.rows() || e_.cols() != a_.cols()) {
    throw InputError("pencil: E is " + std::to_string(e_.rows()) + "x" +
                     std::to_string(e_.cols()) + " but A is " + std::to_string(a_.rows()) +
                     "x" + std::to_string(a_.cols()));
  }
  if (!e_.allFinite() || !a_.allFinite()) {
    throw InputError("pencil: non-finite entries");
  }
}

ComplexPencil to_complex(const RealPencil& p) {
  return ComplexPencil(p.E().cast<std::complex<double>>(), p.A().cast<std::complex<double>>());
}

namespace {

double condition_number(const Eigen::VectorXd& s) {
  if (s.size() == 0) {
    return 1.0;
  }
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1)
                               : std::numeric_limits<double>::infinity();
}

template <class Scalar>
Scalar draw(std::mt19937_64& rng, std::normal_distribution<double>& normal) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return normal(rng);
  } else {
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
  }
}

template <class Scalar>
Matrix<Scalar> clipped_gaussian(Index n, std::mt19937_64& rng, double lo, double hi) {
  if (n == 0) {
    return Matrix<Scalar>(0, 0);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<Scalar> g(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      g(i, j) = draw<Scalar>(rng, normal);
    }
  }
  Eigen::JacobiSVD<Matrix<Scalar>> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues().cwiseMax(lo).cwiseMin(hi);
  return svd.matrixU() * s.cast<Scalar>().asDiagonal() * svd.matrixV().adjoint();
}

} // namespace

template <class Scalar>
EquivalencePair<Scalar> EquivalencePair<Scalar>::make(Matrix<Scalar> p, Matrix<Scalar> q,
                                                      const Tolerance& tol) {
  if (p.rows() != p.cols() || q.rows() != q.cols()) {
    throw InputError("equivalence: P and Q must be square");
  }
  const Eigen::VectorXd sp = singular_values(p);
  const Eigen::VectorXd sq = singular_values(q);
  if (numerical_rank(p, tol) != p.rows() || numerical_rank(q, tol) != q.rows()) {
    throw InputError("equivalence: P or Q is numerically singular");
  }
  return {std::move(p), std::move(q), condition_number(sp), condition_number(sq)};
}

template <class Scalar>
Pencil<Scalar> apply_equivalence(const Pencil<Scalar>& p, const EquivalencePair<Scalar>& t) {
  if (t.P.rows() != p.rows() || t.P.cols() != p.rows() || t.Q.rows() != p.cols() ||
      t.Q.cols() != p.cols()) {
    throw InputError("apply_equivalence: transform shapes do not match the pencil");
  }
  return Pencil<Scalar>(t.P * p.E() * t.Q, t.P * p.A() * t.Q);
}

template <class Scalar>
Matrix<Scalar> random_well_conditioned(Index n, std::uint64_t seed, double sigma_lo,
                                       double sigma_hi) {
  std::mt19937_64 rng(seed);
  return clipped_gaussian<Scalar>(n, rng, sigma_lo, sigma_hi);
}

template <class Scalar>
EquivalencePair<Scalar> random_equivalence(Index rows, Index cols, std::uint64_t seed,
                                           double sigma_lo, double sigma_hi) {
  std::mt19937_64 rng(seed);
  Matrix<Scalar> p = clipped_gaussian<Scalar>(rows, rng, sigma_lo, sigma_hi);
  Matrix<Scalar> q = clipped_gaussian<Scalar>(cols, rng, sigma_lo, sigma_hi);
  return {std::move(p), std::move(q), condition_number(singular_values(p)),
          condition_number(singular_values(q))};
}

// ---------------------------------------------------------------------------

Index Block::rows() const {
  switch (kind) {
  case BlockKind::jordan:
  case BlockKind::nilpotent:
  case BlockKind::right_singular:
    return size;
  case BlockKind::left_singular:
    return size + 1;
  }
  return 0;
}

Index Block::cols() const {
  return kind == BlockKind::right_singular ? size + 1
         : kind == BlockKind::left_singular ? size
                                            : size;
}

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(std::complex<double> z) {
  if (z.imag() == 0.0) {
    return format_double(z.real());
  }
  std::string out = z.real() == 0.0 ? "" : format_double(z.real());
  if (!out.empty() && z.imag() > 0.0) {
    out += '+';
  }
  return out + format_double(z.imag()) + "i";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_real(std::string_view s, std::string_view context) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InputError("block spec: cannot parse number '" + std::string(s) + "' in " +
                     std::string(context));
  }
  return value;
}

std::complex<double> parse_complex(std::string_view s, std::string_view context) {
  s = trim(s);
  if (s.empty() || s.back() != 'i') {
    return {parse_real(s, context), 0.0};
  }
  s.remove_suffix(1);
  // Split at the last sign that does not belong to an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const auto imag_of = [&](std::string_view t) {
    t = trim(t);
    if (t.empty() || t == "+") {
      return 1.0;
    }
    if (t == "-") {
      return -1.0;
    }
    return parse_real(t, context);
  };
  if (split == std::string_view::npos) {
    return {0.0, imag_of(s)};
  }
  return {parse_real(s.substr(0, split), context), imag_of(s.substr(split))};
}

Index parse_size(std::string_view s, std::string_view context, Index minimum) {
  s = trim(s);
  long long value = -1;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InputError("block spec: cannot parse size '" + std::string(s) + "' in " +
                     std::string(context));
  }
  if (value < minimum) {
    throw InputError("block spec: size " + std::to_string(value) + " below minimum " +
                     std::to_string(minimum) + " in " + std::string(context));
  }
  return static_cast<Index>(value);
}

Block parse_block(std::string_view token) {
  token = trim(token);
  const auto open = token.find('(');
  if (open == std::string_view::npos || token.back() != ')') {
    throw InputError("block spec: malformed block '" + std::string(token) + "'");
  }
  const std::string_view name = trim(token.substr(0, open));
  const std::string_view args = token.substr(open + 1, token.size() - open - 2);
  Block b;
  if (name == "J") {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) {
      throw InputError("block spec: J needs (size, eigenvalue) in '" + std::string(token) + "'");
    }
    b.kind = BlockKind::jordan;
    b.size = parse_size(args.substr(0, comma), token, 1);
    b.eigenvalue = parse_complex(args.substr(comma + 1), token);
  } else if (name == "N") {
    b.kind = BlockKind::nilpotent;
    b.size = parse_size(args, token, 1);
  } else if (name == "L") {
    b.kind = BlockKind::right_singular;
    b.size = parse_size(args, token, 0);
  } else if (name == "LT") {
    b.kind = BlockKind::left_singular;
    b.size = parse_size(args, token, 0);
  } else {
    throw InputError("block spec: unknown block type '" + std::string(name) + "'");
  }
  return b;
}

} // namespace

std::string Block::to_string() const {
  switch (kind) {
  case BlockKind::jordan:
    return "J(" + std::to_string(size) + "," + format_complex(eigenvalue) + ")";
  case BlockKind::nilpotent:
    return "N(" + std::to_string(size) + ")";
  case BlockKind::right_singular:
    return "L(" + std::to_string(size) + ")";
  case BlockKind::left_singular:
    return "LT(" + std::to_string(size) + ")";
  }
  return {};
}

Index BlockSpec::rows() const {
  Index r = 0;
  for (const auto& b : blocks) {
    r += b.rows();
  }
  return r;
}

Index BlockSpec::cols() const {
  Index c = 0;
  for (const auto& b : blocks) {
    c += b.cols();
  }
  return c;
}

bool BlockSpec::is_regular() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const Block& b) { return b.is_regular(); });
}

BlockSpec BlockSpec::parse(std::string_view text) {
  BlockSpec spec;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= text.size(); ++k) {
    if (k == text.size() || (text[k] == ',' && depth == 0)) {
      const std::string_view token = trim(text.substr(start, k - start));
      if (!token.empty()) {
        spec.blocks.push_back(parse_block(token));
      } else if (k < text.size()) {
        throw InputError("block spec: empty block in '" + std::string(text) + "'");
      }
      start = k + 1;
    } else if (text[k] == '(') {
      ++depth;
    } else if (text[k] == ')') {
      if (--depth < 0) {
        throw InputError("block spec: unbalanced parentheses in '" + std::string(text) + "'");
      }
    }
  }
  if (depth != 0) {
    throw InputError("block spec: unbalanced parentheses in '" + std::string(text) + "'");
  }
  return spec;
}

std::string BlockSpec::to_string() const {
  std::string out;
  for (const auto& b : blocks) {
    if (!out.empty()) {
      out += ',';
    }
    out += b.to_string();
  }
  return out;
}

template <class Scalar>
Pencil<Scalar> synthesize(const BlockSpec& spec) {
  using M = Matrix<Scalar>;
  M e = M::Zero(spec.rows(), spec.cols());
  M a = M::Zero(spec.rows(), spec.cols());
  Index r0 = 0;
  Index c0 = 0;
  for (const auto& b : spec.blocks) {
    const Index k = b.size;
    switch (b.kind) {
    case BlockKind::jordan: {
      if (k < 1) {
        throw InputError("synthesize: J block needs size >= 1");
      }
      Scalar lambda{};
      if constexpr (std::is_same_v<Scalar, double>) {
        if (b.eigenvalue.imag() != 0.0) {
          throw InputError("synthesize: complex eigenvalue " + b.to_string() +
                           " in a real pencil");
        }
        lambda = b.eigenvalue.real();
      } else {
        lambda = b.eigenvalue;
      }
      e.block(r0, c0, k, k).setIdentity();
      for (Index i = 0; i < k; ++i) {
        a(r0 + i, c0 + i) = lambda;
        if (i + 1 < k) {
          a(r0 + i, c0 + i + 1) = Scalar(1);
        }
      }
      break;
    }
    case BlockKind::nilpotent:
      if (k < 1) {
        throw InputError("synthesize: N block needs size >= 1");
      }
      a.block(r0, c0, k, k).setIdentity();
      for (Index i = 0; i + 1 < k; ++i) {
        e(r0 + i, c0 + i + 1) = Scalar(1);
      }
      break;
    case BlockKind::right_singular:
      for (Index i = 0; i < k; ++i) {
        e(r0 + i, c0 + i) = Scalar(1);
        a(r0 + i, c0 + i + 1) = Scalar(1);
      }
      break;
    case BlockKind::left_singular:
      for (Index i = 0; i < k; ++i) {
        e(r0 + i, c0 + i) = Scalar(1);
        a(r0 + i + 1, c0 + i) = Scalar(1);
      }
      break;
    }
    r0 += b.rows();
    c0 += b.cols();
  }
  return Pencil<Scalar>(std::move(e), std::move(a));
}

template <class Scalar>
Pencil<Scalar> synthesize(const BlockSpec& spec, std::uint64_t seed) {
  const Pencil<Scalar> plain = synthesize<Scalar>(spec);
  return apply_equivalence(plain, random_equivalence<Scalar>(plain.rows(), plain.cols(), seed));
}

#define PENCILKIT_INSTANTIATE(S)                                                          \
  template class Pencil<S>;                                                               \
  template struct EquivalencePair<S>;                                                     \
  template Pencil<S> apply_equivalence<S>(const Pencil<S>&, const EquivalencePair<S>&);   \
  template Matrix<S> random_well_conditioned<S>(Index, std::uint64_t, double, double);    \
  template EquivalencePair<S> random_equivalence<S>(Index, Index, std::uint64_t, double,  \
                                                    double);                              \
  template Pencil<S> synthesize<S>(const BlockSpec&);                                     \
  template Pencil<S> synthesize<S>(const BlockSpec&, std::uint64_t);

PENCILKIT_INSTANTIATE(double)
PENCILKIT_INSTANTIATE(std::complex<double>)

#undef PENCILKIT_INSTANTIATE

} // namespace pencilkit
