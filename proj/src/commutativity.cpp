#include "pencilkit/commutativity.hpp"

#include <cmath>
#include <limits>

#include "pencilkit/defects.hpp"

namespace pencilkit {

template <class Scalar>
MixedReductions<Scalar> mixed_reductions(const Pencil<Scalar>& p, const Tolerance& tol) {
  tol.validate();
  MixedReductions<Scalar> r;
  r.norms = PencilNorms::of(p);
  r.obs = observation_reduce(p, tol, r.norms);
  r.obs_ctrl = control_reduce(r.obs.reduced, tol, r.norms);
  r.ctrl = control_reduce(p, tol, r.norms);
  r.ctrl_obs = observation_reduce(r.ctrl.reduced, tol, r.norms);
  r.domain_oc = r.obs.domain.basis() * r.obs_ctrl.domain.basis();
  r.codomain_oc = r.obs.codomain.basis() * r.obs_ctrl.codomain.basis();
  r.domain_co = r.ctrl.domain.basis() * r.ctrl_obs.domain.basis();
  r.codomain_co = r.ctrl.codomain.basis() * r.ctrl_obs.codomain.basis();
  return r;
}

namespace {

double sigma_min_of(const Eigen::VectorXd& sv, Index rows, Index cols) {
  if (rows == 0 && cols == 0) {
    return std::numeric_limits<double>::infinity();
  }
  if (rows != cols) {
    return 0.0;
  }
  return sv(sv.size() - 1);
}

template <class Scalar>
struct NaturalMap {
  Matrix<Scalar> matrix;
  double image_residual = 0.0;
};

// source lives in the original space; the quotient by the subspace
// orthogonal to `quotient_rep` is taken by projecting onto quotient_rep, then
// coordinates in target (a subspace of span(quotient_rep)).
template <class Scalar>
NaturalMap<Scalar> natural_map(const Matrix<Scalar>& source, const Matrix<Scalar>& quotient_rep,
                               const Matrix<Scalar>& target) {
  NaturalMap<Scalar> out;
  const Matrix<Scalar> projected = quotient_rep * (quotient_rep.adjoint() * source);
  out.matrix = target.adjoint() * projected;
  if (projected.size() > 0) {
    out.image_residual = operator_norm<Scalar>(Matrix<Scalar>(projected - target * out.matrix));
  }
  return out;
}

template <class Scalar>
NaturalMap<Scalar> ju_of(const MixedReductions<Scalar>& r) {
  return natural_map<Scalar>(r.domain_oc, r.ctrl.domain.basis(), r.domain_co);
}

template <class Scalar>
NaturalMap<Scalar> jw_of(const MixedReductions<Scalar>& r) {
  return natural_map<Scalar>(r.codomain_oc, r.ctrl.codomain.basis(), r.codomain_co);
}

template <class Scalar>
void require_injective(const Matrix<Scalar>& j, const Tolerance& tol, const char* what) {
  const double thr = tol.threshold(1.0, j.rows(), j.cols());
  if (j.cols() > 0 && numerical_rank<Scalar>(j, tol, 1.0) != j.cols()) {
    throw InconsistencyError(std::string(what) + " is not injective at threshold " +
                             std::to_string(thr));
  }
}

} // namespace

template <class Scalar>
Matrix<Scalar> build_JU(const Pencil<Scalar>& p, const Tolerance& tol) {
  Matrix<Scalar> j = ju_of(mixed_reductions(p, tol)).matrix;
  require_injective<Scalar>(j, tol, "build_JU");
  return j;
}

template <class Scalar>
Matrix<Scalar> build_JW(const Pencil<Scalar>& p, const Tolerance& tol) {
  Matrix<Scalar> j = jw_of(mixed_reductions(p, tol)).matrix;
  require_injective<Scalar>(j, tol, "build_JW");
  return j;
}

template <class Scalar>
CommutativityCertificate<Scalar> commute_check(const Pencil<Scalar>& p, const Tolerance& tol) {
  const auto r = mixed_reductions(p, tol);
  CommutativityCertificate<Scalar> c;
  const auto ju = ju_of(r);
  const auto jw = jw_of(r);
  c.JU = ju.matrix;
  c.JW = jw.matrix;
  c.image_residual_JU = ju.image_residual;
  c.image_residual_JW = jw.image_residual;
  c.norm_JU = operator_norm<Scalar>(c.JU);
  c.norm_JW = operator_norm<Scalar>(c.JW);
  c.sigma_min_JU = sigma_min_of(singular_values<Scalar>(c.JU), c.JU.rows(), c.JU.cols());
  c.sigma_min_JW = sigma_min_of(singular_values<Scalar>(c.JW), c.JW.rows(), c.JW.cols());

  const Pencil<Scalar>& oc = r.obs_ctrl.reduced;
  const Pencil<Scalar>& co = r.ctrl_obs.reduced;
  const bool shapes_match = oc.rows() == co.rows() && oc.cols() == co.cols() &&
                            c.JU.rows() == c.JU.cols() && c.JW.rows() == c.JW.cols();
  if (shapes_match) {
    c.intertwine_residual_E =
        oc.E().size() > 0 ? operator_norm<Scalar>(Matrix<Scalar>(c.JW * oc.E() - co.E() * c.JU))
                              : 0.0;
    c.intertwine_residual_A =
        oc.E().size() > 0 ? operator_norm<Scalar>(Matrix<Scalar>(c.JW * oc.A() - co.A() * c.JU))
                              : 0.0;
  } else {
    c.intertwine_residual_E = std::numeric_limits<double>::infinity();
    c.intertwine_residual_A = std::numeric_limits<double>::infinity();
  }
  const double size = static_cast<double>(std::max<Index>({p.rows(), p.cols(), 1}));
  c.residual_bound = 100.0 * tol.rel * size * (r.norms.e + r.norms.a);
  const double j_thr_u = tol.threshold(1.0, c.JU.rows(), c.JU.cols());
  const double j_thr_w = tol.threshold(1.0, c.JW.rows(), c.JW.cols());
  c.equivalent = shapes_match && c.sigma_min_JU > j_thr_u && c.sigma_min_JW > j_thr_w &&
                 c.intertwine_residual_E <= c.residual_bound &&
                 c.intertwine_residual_A <= c.residual_bound &&
                 c.image_residual_JU <= std::sqrt(tol.rel) &&
                 c.image_residual_JW <= std::sqrt(tol.rel);

  c.obs_pivot_invertible = r.obs.pivot_invertible;
  c.ctrl_obs_pivot_invertible = r.ctrl_obs.pivot_invertible;
  c.ctrl_pivot_invertible = r.ctrl.pivot_invertible;
  c.obs_ctrl_pivot_invertible = r.obs_ctrl.pivot_invertible;
  c.ctrl_pivot_kernel = r.ctrl.defect();
  c.obs_ctrl_pivot_kernel = r.obs_ctrl.defect();
  c.pivot_equivalences_hold = c.obs_pivot_invertible == c.ctrl_obs_pivot_invertible &&
                              c.ctrl_pivot_invertible == c.obs_ctrl_pivot_invertible &&
                              c.ctrl_pivot_kernel == c.obs_ctrl_pivot_kernel;
  return c;
}

template <class Scalar>
std::vector<DimensionCheck> interwoven_dimension_checks(const Pencil<Scalar>& p,
                                                        const Tolerance& tol) {
  const auto r = mixed_reductions(p, tol);
  using LL = long long;
  const LL m = p.rows();
  const LL n = p.cols();
  const LL rank_e = r.obs.codomain.dim();
  const LL u1 = r.obs.domain.dim();
  const LL ker_e = r.ctrl.pivot_domain.dim();
  const LL a_ker_e = r.ctrl.pivot_codomain.dim();
  const LL ker_e1 = r.obs_ctrl.pivot_domain.dim();
  const LL u_oc = r.obs_ctrl.domain.dim();
  const LL w_oc = r.obs_ctrl.codomain.dim();
  const LL u_c = r.ctrl.domain.dim();
  const LL w_c = r.ctrl.codomain.dim();
  const LL u_co = r.ctrl_obs.domain.dim();
  const LL w_co = r.ctrl_obs.codomain.dim();
  const LL coker_ec = w_c - r.ctrl_obs.codomain.dim();
  const LL beta_obs = r.obs.defect();
  const LL beta_obs_co = r.ctrl_obs.defect();
  const LL ker_pivot_c = r.ctrl.defect();
  const LL ker_pivot_oc = r.obs_ctrl.defect();
  const LL cap = intersect_basis(r.obs.codomain, r.ctrl.pivot_codomain, tol).dim();
  const LL alpha = alpha_defect(p, tol, r.norms);

  return {
      {"U rows: ker E*1 -> ker E -> A ker E / (A ker E cap range E)", ker_e1 - ker_e + (a_ker_e - cap)},
      {"U rows: U*1 -> U -> W / range E -> coker pivot", u1 - n + (m - rank_e) - beta_obs},
      {"U rows: U^1*1 -> U^1 -> coker E^1 -> coker pivot", u_co - u_c + coker_ec - beta_obs_co},
      {"U cols: ker E*1 -> U*1 -> U*1^1", ker_e1 - u1 + u_oc},
      {"U cols: ker E -> U -> U^1", ker_e - n + u_c},
      {"U cols: A ker E quotient -> W / range E -> coker E^1", (a_ker_e - cap) - (m - rank_e) + coker_ec},
      {"U cols: observation cokernels agree", beta_obs - beta_obs_co},
      {"U corner: U*1^1 and U^1*1 isomorphic", u_oc - u_co},
      {"W rows: ker [A*1^1] = ker [A^1]", ker_pivot_oc - ker_pivot_c},
      {"W rows: ker E*1 -> ker E -> ker [E]", ker_e1 - ker_e + alpha},
      {"W rows: W*1^1 -> W^1 -> coker E^1", w_oc - w_c + coker_ec},
      {"W cols: ker [A*1^1] -> ker E*1 -> W*1 -> W*1^1", ker_pivot_oc - ker_e1 + rank_e - w_oc},
      {"W cols: ker [A^1] -> ker E -> W -> W^1", ker_pivot_c - ker_e + m - w_c},
      {"W cols: ker [E] -> W / range E -> coker E^1", alpha - (m - rank_e) + coker_ec},
      {"W corner: W*1^1 and W^1*1 isomorphic", w_oc - w_co},
  };
}

#define PENCILKIT_INSTANTIATE(S)                                                          \
  template struct MixedReductions<S>;                                                     \
  template struct CommutativityCertificate<S>;                                            \
  template MixedReductions<S> mixed_reductions<S>(const Pencil<S>&, const Tolerance&);    \
  template Matrix<S> build_JU<S>(const Pencil<S>&, const Tolerance&);                     \
  template Matrix<S> build_JW<S>(const Pencil<S>&, const Tolerance&);                     \
  template CommutativityCertificate<S> commute_check<S>(const Pencil<S>&,                 \
                                                        const Tolerance&);                \
  template std::vector<DimensionCheck> interwoven_dimension_checks<S>(const Pencil<S>&,   \
                                                                      const Tolerance&);

PENCILKIT_INSTANTIATE(double)
PENCILKIT_INSTANTIATE(std::complex<double>)

#undef PENCILKIT_INSTANTIATE

} // namespace pencilkit
