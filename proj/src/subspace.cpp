#include "pencilkit/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pencilkit {

double Tolerance::threshold(double scale, Index rows, Index cols) const {
  const double dim = static_cast<double>(std::max<Index>({rows, cols, 1}));
  return std::max(abs_floor, rel * scale * dim);
}

void Tolerance::validate() const {
  if (!(rel > 0.0) || !std::isfinite(rel)) {
    throw InputError("tolerance: rel must be a positive finite number");
  }
  if (!(abs_floor >= 0.0) || !std::isfinite(abs_floor)) {
    throw InputError("tolerance: abs_floor must be a nonnegative finite number");
  }
}

namespace {

template <class Scalar>
void require_finite(const Matrix<Scalar>& m, const char* what) {
  if (!m.allFinite()) {
    throw InputError(std::string(what) + ": matrix has non-finite entries");
  }
}

Index count_above(const Eigen::VectorXd& s, double thr) {
  Index r = 0;
  while (r < s.size() && s(r) > thr) {
    ++r;
  }
  return r;
}

template <class Scalar>
struct FullSvd {
  Eigen::VectorXd s;
  Matrix<Scalar> u;
  Matrix<Scalar> v;
};

template <class Scalar>
FullSvd<Scalar> full_svd(const Matrix<Scalar>& m, unsigned options) {
  Eigen::BDCSVD<Matrix<Scalar>> svd(m, options);
  FullSvd<Scalar> out;
  out.s = svd.singularValues();
  if (options & (Eigen::ComputeFullU | Eigen::ComputeThinU)) {
    out.u = svd.matrixU();
  }
  if (options & (Eigen::ComputeFullV | Eigen::ComputeThinV)) {
    out.v = svd.matrixV();
  }
  return out;
}

template <class Scalar>
Matrix<Scalar> thin_q(const Matrix<Scalar>& spanning) {
  const Index n = spanning.rows();
  const Index k = spanning.cols();
  Eigen::HouseholderQR<Matrix<Scalar>> qr(spanning);
  Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(n, k);
  return q;
}

// Orthonormal basis of range and null space of [s, -t] from one SVD, so
// that the two dimensions add up exactly.
template <class Scalar>
std::pair<Subspace<Scalar>, Subspace<Scalar>>
sum_and_intersection(const Subspace<Scalar>& s, const Subspace<Scalar>& t,
                     const Tolerance& tol) {
  if (s.ambient_dim() != t.ambient_dim()) {
    throw InputError("sum/intersection: subspaces live in different ambient spaces (" +
                     std::to_string(s.ambient_dim()) + " vs " +
                     std::to_string(t.ambient_dim()) + ")");
  }
  const Index n = s.ambient_dim();
  const Index k1 = s.dim();
  const Index k2 = t.dim();
  if (k1 + k2 == 0 || n == 0) {
    return {Subspace<Scalar>::zero(n), Subspace<Scalar>::zero(n)};
  }
  Matrix<Scalar> stacked(n, k1 + k2);
  stacked << s.basis(), -t.basis();
  const auto svd = full_svd(stacked, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const double thr = tol.threshold(svd.s.size() ? svd.s(0) : 0.0, n, k1 + k2);
  const Index r = count_above(svd.s, thr);
  Subspace<Scalar> sum(Matrix<Scalar>(svd.u.leftCols(r)));
  const Index d = k1 + k2 - r;
  if (d == 0) {
    return {std::move(sum), Subspace<Scalar>::zero(n)};
  }
  const Matrix<Scalar> coeff = svd.v.rightCols(d);
  // s x = t y on the kernel; average both sides for symmetry.
  const Matrix<Scalar> common =
      s.basis() * coeff.topRows(k1) + t.basis() * coeff.bottomRows(k2);
  return {std::move(sum), Subspace<Scalar>::orthonormalized(common)};
}

} // namespace

template <class Scalar>
Eigen::VectorXd singular_values(const Matrix<Scalar>& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    return Eigen::VectorXd(0);
  }
  return full_svd(m, 0).s;
}

template <class Scalar>
double operator_norm(const Matrix<Scalar>& m) {
  const Eigen::VectorXd s = singular_values(m);
  return s.size() ? s(0) : 0.0;
}

template <class Scalar>
Index numerical_rank(const Matrix<Scalar>& m, const Tolerance& tol,
                     std::optional<double> scale) {
  const Eigen::VectorXd s = singular_values(m);
  if (s.size() == 0) {
    return 0;
  }
  return count_above(s, tol.threshold(scale.value_or(s(0)), m.rows(), m.cols()));
}

template <class Scalar>
Subspace<Scalar>::Subspace(MatrixType basis) : basis_(std::move(basis)) {
  const Index k = basis_.cols();
  if (k > basis_.rows()) {
    throw InputError("subspace: more basis vectors than the ambient dimension");
  }
  if (k == 0) {
    return;
  }
  const double limit = 10.0 * std::numeric_limits<double>::epsilon() *
                       static_cast<double>(std::max<Index>(basis_.rows(), 1));
  const MatrixType gram = basis_.adjoint() * basis_;
  const double dev = (gram - MatrixType::Identity(k, k)).cwiseAbs().maxCoeff();
  if (!(dev <= limit)) {
    throw InputError("subspace: basis columns are not orthonormal (deviation " +
                     std::to_string(dev) + ")");
  }
  // Phase convention: the first entry of (near-)largest modulus in each
  // column is real and positive.
  for (Index j = 0; j < k; ++j) {
    auto col = basis_.col(j);
    const double top = col.cwiseAbs().maxCoeff();
    Index at = 0;
    while (std::abs(col(at)) < top * (1.0 - 1e-8)) {
      ++at;
    }
    const Scalar x = col(at);
    if constexpr (std::is_same_v<Scalar, double>) {
      if (x < 0) {
        col = -col;
      }
    } else {
      col *= std::conj(x) / std::abs(x);
      col(at) = Scalar(std::abs(col(at)), 0.0);
    }
  }
}

template <class Scalar>
Subspace<Scalar> Subspace<Scalar>::orthonormalized(const MatrixType& spanning) {
  if (spanning.cols() == 0) {
    return zero(spanning.rows());
  }
  return Subspace(thin_q(spanning));
}

template <class Scalar>
Subspace<Scalar> Subspace<Scalar>::zero(Index ambient_dim) {
  return Subspace(MatrixType(ambient_dim, 0));
}

template <class Scalar>
Subspace<Scalar> Subspace<Scalar>::full(Index ambient_dim) {
  return Subspace(MatrixType::Identity(ambient_dim, ambient_dim));
}

template <class Scalar>
typename Subspace<Scalar>::MatrixType Subspace<Scalar>::projector() const {
  return basis_ * basis_.adjoint();
}

template <class Scalar>
Subspace<Scalar> Subspace<Scalar>::complement() const {
  const Index n = ambient_dim();
  const Index k = dim();
  if (k == 0) {
    return full(n);
  }
  if (k == n) {
    return zero(n);
  }
  Eigen::HouseholderQR<MatrixType> qr(basis_);
  const MatrixType q = qr.householderQ();
  return Subspace(MatrixType(q.rightCols(n - k)));
}

template <class Scalar>
double Subspace<Scalar>::residual(const MatrixType& vectors) const {
  if (vectors.rows() != ambient_dim()) {
    throw InputError("subspace residual: dimension mismatch");
  }
  if (vectors.cols() == 0) {
    return 0.0;
  }
  const MatrixType off = vectors - basis_ * (basis_.adjoint() * vectors);
  return operator_norm<Scalar>(off);
}

template <class Scalar>
Subspace<Scalar> range_basis(const Matrix<Scalar>& m, const Tolerance& tol,
                             std::optional<double> scale) {
  require_finite(m, "range_basis");
  if (m.rows() == 0 || m.cols() == 0) {
    return Subspace<Scalar>::zero(m.rows());
  }
  const auto svd = full_svd(m, Eigen::ComputeThinU);
  const double thr = tol.threshold(scale.value_or(svd.s(0)), m.rows(), m.cols());
  const Index r = count_above(svd.s, thr);
  return Subspace<Scalar>(Matrix<Scalar>(svd.u.leftCols(r)));
}

template <class Scalar>
Subspace<Scalar> kernel_basis(const Matrix<Scalar>& m, const Tolerance& tol,
                              std::optional<double> scale) {
  require_finite(m, "kernel_basis");
  if (m.cols() == 0) {
    return Subspace<Scalar>::zero(0);
  }
  if (m.rows() == 0) {
    return Subspace<Scalar>::full(m.cols());
  }
  const auto svd = full_svd(m, Eigen::ComputeFullV);
  const double thr = tol.threshold(scale.value_or(svd.s(0)), m.rows(), m.cols());
  const Index r = count_above(svd.s, thr);
  return Subspace<Scalar>(Matrix<Scalar>(svd.v.rightCols(m.cols() - r)));
}

template <class Scalar>
Subspace<Scalar> preimage_basis(const Matrix<Scalar>& m,
                                const Subspace<Scalar>& target,
                                const Tolerance& tol,
                                std::optional<double> scale) {
  require_finite(m, "preimage_basis");
  if (m.rows() != target.ambient_dim()) {
    throw InputError("preimage_basis: operator has " + std::to_string(m.rows()) +
                     " rows but the target lives in dimension " +
                     std::to_string(target.ambient_dim()));
  }
  const Matrix<Scalar> outside = target.complement().basis();
  if (outside.cols() == 0) {
    return Subspace<Scalar>::full(m.cols());
  }
  // Same kernel as P m with P the projector onto the complement of target;
  // the rank threshold refers to m itself.
  const double ref = scale.value_or(operator_norm(m));
  const Matrix<Scalar> projected = outside.adjoint() * m;
  if (projected.cols() == 0) {
    return Subspace<Scalar>::zero(0);
  }
  const auto svd = full_svd(projected, Eigen::ComputeFullV);
  const Index r = count_above(svd.s, tol.threshold(ref, m.rows(), m.cols()));
  return Subspace<Scalar>(Matrix<Scalar>(svd.v.rightCols(m.cols() - r)));
}

template <class Scalar>
Subspace<Scalar> sum_basis(const Subspace<Scalar>& s, const Subspace<Scalar>& t,
                           const Tolerance& tol) {
  return sum_and_intersection(s, t, tol).first;
}

template <class Scalar>
Subspace<Scalar> intersect_basis(const Subspace<Scalar>& s,
                                 const Subspace<Scalar>& t,
                                 const Tolerance& tol) {
  return sum_and_intersection(s, t, tol).second;
}

template <class Scalar>
Subspace<Scalar> quotient_basis(const Subspace<Scalar>& ambient,
                                const Subspace<Scalar>& v, const Tolerance& tol) {
  if (ambient.ambient_dim() != v.ambient_dim()) {
    throw InputError("quotient_basis: subspaces live in different ambient spaces");
  }
  if (v.dim() > ambient.dim()) {
    throw ContainmentError("quotient_basis: subspace is larger than the ambient subspace");
  }
  const double res = ambient.residual(v.basis());
  const double thr = tol.threshold(1.0, ambient.ambient_dim(), v.dim());
  if (!(res <= thr)) {
    throw ContainmentError("quotient_basis: subspace is not contained in the ambient "
                           "subspace (residual " + std::to_string(res) + ")");
  }
  if (v.dim() == 0) {
    return ambient;
  }
  const Matrix<Scalar> coords = ambient.basis().adjoint() * v.basis();
  const Matrix<Scalar> rest = Subspace<Scalar>::orthonormalized(coords).complement().basis();
  return Subspace<Scalar>(Matrix<Scalar>(ambient.basis() * rest));
}

template <class Scalar>
double subspace_gap(const Subspace<Scalar>& s, const Subspace<Scalar>& t) {
  if (s.ambient_dim() != t.ambient_dim()) {
    throw InputError("subspace_gap: subspaces live in different ambient spaces");
  }
  if (s.dim() != t.dim()) {
    return 1.0;
  }
  if (s.dim() == 0) {
    return 0.0;
  }
  return std::min(1.0, std::max(t.residual(s.basis()), s.residual(t.basis())));
}

template <class Scalar>
InducedOperator<Scalar> induced_operator(const Matrix<Scalar>& m,
                                         const Subspace<Scalar>& dom,
                                         const Subspace<Scalar>& target,
                                         const Tolerance& tol,
                                         std::optional<double> scale) {
  require_finite(m, "induced_operator");
  if (m.cols() != dom.ambient_dim() || m.rows() != target.ambient_dim()) {
    throw InputError("induced_operator: operator shape does not match the subspaces");
  }
  const Matrix<Scalar> image = m * dom.basis();
  InducedOperator<Scalar> out;
  out.matrix = target.basis().adjoint() * image;
  out.residual = image.cols() ? operator_norm<Scalar>(image - target.basis() * out.matrix) : 0.0;
  const double thr = tol.threshold(scale.value_or(operator_norm(m)), m.rows(), m.cols());
  if (!(out.residual <= thr)) {
    throw InvarianceError("induced_operator: operator does not map the domain into the "
                          "target (residual " + std::to_string(out.residual) +
                          ", threshold " + std::to_string(thr) + ")");
  }
  return out;
}

template <class Scalar>
InducedOperator<Scalar> quotient_operator(const Matrix<Scalar>& m,
                                          const Subspace<Scalar>& sub_dom,
                                          const Subspace<Scalar>& sub_codom,
                                          const Tolerance& tol,
                                          std::optional<double> scale) {
  require_finite(m, "quotient_operator");
  if (m.cols() != sub_dom.ambient_dim() || m.rows() != sub_codom.ambient_dim()) {
    throw InputError("quotient_operator: operator shape does not match the subspaces");
  }
  const double ref = scale.value_or(operator_norm(m));
  InducedOperator<Scalar> out;
  out.residual = sub_codom.residual(m * sub_dom.basis());
  const double thr = tol.threshold(ref, m.rows(), m.cols());
  if (!(out.residual <= thr)) {
    throw InvarianceError("quotient_operator: operator does not map the subspace into "
                          "the target subspace (residual " + std::to_string(out.residual) + ")");
  }
  out.matrix = sub_codom.complement().basis().adjoint() * m * sub_dom.complement().basis();
  return out;
}

#define PENCILKIT_INSTANTIATE(S)                                                          \
  template Eigen::VectorXd singular_values<S>(const Matrix<S>&);                          \
  template double operator_norm<S>(const Matrix<S>&);                                     \
  template Index numerical_rank<S>(const Matrix<S>&, const Tolerance&,                    \
                                   std::optional<double>);                                \
  template class Subspace<S>;                                                             \
  template Subspace<S> range_basis<S>(const Matrix<S>&, const Tolerance&,                 \
                                      std::optional<double>);                             \
  template Subspace<S> kernel_basis<S>(const Matrix<S>&, const Tolerance&,                \
                                       std::optional<double>);                            \
  template Subspace<S> preimage_basis<S>(const Matrix<S>&, const Subspace<S>&,            \
                                         const Tolerance&, std::optional<double>);        \
  template Subspace<S> sum_basis<S>(const Subspace<S>&, const Subspace<S>&,               \
                                    const Tolerance&);                                    \
  template Subspace<S> intersect_basis<S>(const Subspace<S>&, const Subspace<S>&,         \
                                          const Tolerance&);                              \
  template Subspace<S> quotient_basis<S>(const Subspace<S>&, const Subspace<S>&,          \
                                         const Tolerance&);                               \
  template double subspace_gap<S>(const Subspace<S>&, const Subspace<S>&);                \
  template InducedOperator<S> induced_operator<S>(const Matrix<S>&, const Subspace<S>&,   \
                                                  const Subspace<S>&, const Tolerance&,   \
                                                  std::optional<double>);                 \
  template InducedOperator<S> quotient_operator<S>(const Matrix<S>&, const Subspace<S>&,  \
                                                   const Subspace<S>&, const Tolerance&,  \
                                                   std::optional<double>);

PENCILKIT_INSTANTIATE(double)
PENCILKIT_INSTANTIATE(std::complex<double>)

#undef PENCILKIT_INSTANTIATE

} // namespace pencilkit
