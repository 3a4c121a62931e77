#include <algorithm>
#include <cmath>
#include <string>

#include "pencilkit/reduction.hpp"

namespace pencilkit {

namespace {

template <class Scalar>
struct FirstStepSpaces {
  PencilNorms norms;
  Subspace<Scalar> range_e;
  Subspace<Scalar> kernel_e;
  Subspace<Scalar> a_kernel_e;
  Matrix<Scalar> a_kernel_e_image;  // A times the kernel basis
};

template <class Scalar>
FirstStepSpaces<Scalar> first_step_spaces(const Pencil<Scalar>& p, const Tolerance& tol,
                                          std::optional<PencilNorms> ref) {
  FirstStepSpaces<Scalar> s;
  s.norms = ref.value_or(PencilNorms::of(p));
  s.range_e = range_basis<Scalar>(p.E(), tol, s.norms.e);
  s.kernel_e = kernel_basis<Scalar>(p.E(), tol, s.norms.e);
  s.a_kernel_e_image = p.A() * s.kernel_e.basis();
  s.a_kernel_e = image_subspace(p, s.a_kernel_e_image, tol, s.norms);
  return s;
}

} // namespace

template <class Scalar>
NormalityDiagnostics normality_check(const Pencil<Scalar>& p, const Tolerance& tol,
                                     std::optional<PencilNorms> ref) {
  tol.validate();
  const auto sp = first_step_spaces(p, tol, ref);
  const Index m = p.rows();
  NormalityDiagnostics out;

  // Sum of the two subspaces versus the range of the combined operator
  // [E, A on ker E], each block normalized by its reference norm.
  const Subspace<Scalar> sum = sum_basis(sp.range_e, sp.a_kernel_e, tol);
  const Index k = sp.kernel_e.dim();
  Matrix<Scalar> joint(m, p.cols() + k);
  joint.leftCols(p.cols()) =
      sp.norms.e > 0 ? Matrix<Scalar>(p.E() / sp.norms.e) : Matrix<Scalar>::Zero(m, p.cols());
  joint.rightCols(k) = sp.norms.a > 0 ? Matrix<Scalar>(sp.a_kernel_e_image / sp.norms.a)
                                      : Matrix<Scalar>::Zero(m, k);
  const double unit = static_cast<double>(std::max<Index>({m, p.cols(), 1})) /
                      static_cast<double>(std::max<Index>({m, p.cols() + k, 1}));
  const Subspace<Scalar> joint_range = range_basis<Scalar>(joint, tol, unit);
  out.sum_gap = subspace_gap(sum, joint_range);
  out.int_gap = image_of_reduced_kernel_gap(p, tol, sp.norms);
  const double gap_tol = std::sqrt(tol.rel);
  out.normal = out.sum_gap <= gap_tol && out.int_gap <= gap_tol;
  return out;
}

template <class Scalar>
double image_of_reduced_kernel_gap(const Pencil<Scalar>& p, const Tolerance& tol,
                                   std::optional<PencilNorms> ref) {
  const auto sp = first_step_spaces(p, tol, ref);
  const auto obs = observation_reduce(p, tol, sp.norms);
  const Subspace<Scalar> ker_obs = kernel_basis<Scalar>(obs.reduced.E(), tol, sp.norms.e);
  const Matrix<Scalar> embedded = obs.domain.basis() * ker_obs.basis();
  const Subspace<Scalar> lhs = image_subspace(p, Matrix<Scalar>(p.A() * embedded), tol, sp.norms);
  const Subspace<Scalar> rhs = intersect_basis(sp.range_e, sp.a_kernel_e, tol);
  return subspace_gap(lhs, rhs);
}

template <class Scalar>
IndexOneResult control_index_one(const Pencil<Scalar>& p, const Tolerance& tol,
                                 std::optional<PencilNorms> ref) {
  tol.validate();
  const auto sp = first_step_spaces(p, tol, ref);
  IndexOneResult out;
  out.intersection_dim = intersect_basis(sp.range_e, sp.a_kernel_e, tol).dim();
  const auto ctrl = control_reduce(p, tol, sp.norms);
  const Index rank = numerical_rank<Scalar>(ctrl.reduced.E(), tol, sp.norms.e);
  out.reduced_e_injective = rank == ctrl.reduced.cols();
  out.index_one = out.intersection_dim == 0;
  if (out.index_one != out.reduced_e_injective) {
    throw InconsistencyError(
        "control_index_one: range E intersect A ker E has dimension " +
        std::to_string(out.intersection_dim) + " but the control-reduced E is " +
        (out.reduced_e_injective ? "injective" : "not injective"));
  }
  return out;
}

template <class Scalar>
VariationalCheck variational_index_one_check(const Matrix<Scalar>& d, const Matrix<Scalar>& a,
                                             const Tolerance& tol) {
  tol.validate();
  if (a.rows() != a.cols()) {
    throw InputError("variational_index_one_check: A must be square");
  }
  if (d.cols() != a.cols()) {
    throw InputError("variational_index_one_check: D must have as many columns as A");
  }
  const Index n = a.cols();
  VariationalCheck out;
  if (n == 0) {
    out.coercive = true;
    out.index_one = true;
    return out;
  }
  const Matrix<Scalar> hermitian = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(hermitian, Eigen::EigenvaluesOnly);
  const double thr = tol.threshold(operator_norm<Scalar>(a), n, n);
  out.coercive = eig.eigenvalues()(0) > thr;
  if (!out.coercive) {
    return out;
  }
  const Matrix<Scalar> e = d.adjoint() * d;
  out.index_one = control_index_one(Pencil<Scalar>(e, a), tol).index_one;
  if (!*out.index_one) {
    throw InconsistencyError(
        "variational_index_one_check: E = D^H D with coercive A lacks control index one");
  }
  return out;
}

template <class Scalar>
std::optional<double> yagi_bound(const Pencil<Scalar>& p, const Tolerance& tol) {
  tol.validate();
  const PencilNorms norms = PencilNorms::of(p);
  const Subspace<Scalar> kernel = kernel_basis<Scalar>(p.E(), tol, norms.e);
  const Subspace<Scalar> rest = kernel.complement();
  const Index n = p.cols();
  std::optional<double> beta = 0.0;
  if (rest.dim() > 0) {
    const Matrix<Scalar> er = p.E() * rest.basis();
    // Cross term Re <E r, A k>: unbounded in k unless it vanishes.
    const Matrix<Scalar> cross = er.adjoint() * (p.A() * kernel.basis());
    const double thr = tol.threshold(norms.e * norms.a, n, n);
    if (cross.size() > 0 && operator_norm<Scalar>(cross) > thr) {
      beta.reset();
    } else {
      const Matrix<Scalar> ar = p.A() * rest.basis();
      const Matrix<Scalar> g = er.adjoint() * er;
      const Matrix<Scalar> h = (er.adjoint() * ar + ar.adjoint() * er) / 2.0;
      Eigen::GeneralizedSelfAdjointEigenSolver<Matrix<Scalar>> eig(h, g, Eigen::EigenvaluesOnly);
      if (eig.info() != Eigen::Success) {
        throw InconsistencyError("yagi_bound: E is not injective on the complement of its kernel");
      }
      beta = std::max(0.0, eig.eigenvalues()(eig.eigenvalues().size() - 1));
    }
  }
  if (beta && !control_index_one(p, tol, norms).index_one) {
    throw InconsistencyError("yagi_bound: finite bound but no control index one");
  }
  return beta;
}

template <class Scalar>
StepDimensions step_dimensions(const Pencil<Scalar>& p, const Tolerance& tol,
                               std::optional<PencilNorms> ref) {
  tol.validate();
  const auto sp = first_step_spaces(p, tol, ref);
  StepDimensions d;
  d.rows = p.rows();
  d.cols = p.cols();
  d.rank_e = sp.range_e.dim();
  d.ker_e = sp.kernel_e.dim();
  d.a_ker_e = sp.a_kernel_e.dim();
  d.range_e_cap_a_ker_e = intersect_basis(sp.range_e, sp.a_kernel_e, tol).dim();
  d.range_e_plus_a_ker_e = sum_basis(sp.range_e, sp.a_kernel_e, tol).dim();

  const auto obs = observation_reduce(p, tol, sp.norms);
  d.obs_domain = obs.domain.dim();
  const Subspace<Scalar> ker_obs = kernel_basis<Scalar>(obs.reduced.E(), tol, sp.norms.e);
  d.ker_e_obs = ker_obs.dim();
  const Matrix<Scalar> embedded = obs.domain.basis() * ker_obs.basis();
  d.a_ker_e_obs = image_subspace(p, Matrix<Scalar>(p.A() * embedded), tol, sp.norms).dim();

  const auto ctrl = control_reduce(p, tol, sp.norms);
  d.ctrl_rows = ctrl.reduced.rows();
  d.ctrl_rank_e = numerical_rank<Scalar>(ctrl.reduced.E(), tol, sp.norms.e);
  return d;
}

long long exact_sequence_defect(const StepDimensions& d) {
  return static_cast<long long>(d.ker_e_obs) - d.ker_e + (d.rows - d.rank_e) -
         (d.ctrl_rows - d.ctrl_rank_e);
}

long long cokernel_identity_defect(const StepDimensions& d) {
  return static_cast<long long>(d.ctrl_rows - d.ctrl_rank_e) - (d.rows - d.range_e_plus_a_ker_e);
}

#define PENCILKIT_INSTANTIATE(S)                                                          \
  template NormalityDiagnostics normality_check<S>(const Pencil<S>&, const Tolerance&,    \
                                                   std::optional<PencilNorms>);           \
  template double image_of_reduced_kernel_gap<S>(const Pencil<S>&, const Tolerance&,      \
                                                 std::optional<PencilNorms>);             \
  template IndexOneResult control_index_one<S>(const Pencil<S>&, const Tolerance&,        \
                                               std::optional<PencilNorms>);               \
  template VariationalCheck variational_index_one_check<S>(const Matrix<S>&,              \
                                                           const Matrix<S>&,              \
                                                           const Tolerance&);             \
  template std::optional<double> yagi_bound<S>(const Pencil<S>&, const Tolerance&);       \
  template StepDimensions step_dimensions<S>(const Pencil<S>&, const Tolerance&,          \
                                             std::optional<PencilNorms>);

PENCILKIT_INSTANTIATE(double)
PENCILKIT_INSTANTIATE(std::complex<double>)

#undef PENCILKIT_INSTANTIATE

} // namespace pencilkit
