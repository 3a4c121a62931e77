#include "pencilkit/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pencilkit {

std::string_view to_string(ReductionKind k) {
  return k == ReductionKind::observation ? "observation" : "control";
}

Index default_max_steps(Index rows, Index cols) {
  return std::min(rows, cols) + 1;
}

template <class Scalar>
Index ReductionStep<Scalar>::defect() const {
  return kind == ReductionKind::observation ? pivot.rows() - pivot_rank
                                            : pivot.cols() - pivot_rank;
}

template <class Scalar>
bool ReductionChain<Scalar>::all_pivots_invertible() const {
  return std::all_of(steps.begin(), steps.end(),
                     [](const auto& s) { return s.pivot_invertible; });
}

namespace {

template <class Scalar>
void finish_pivot(ReductionStep<Scalar>& s, double thr) {
  s.pivot_singular_values = singular_values<Scalar>(s.pivot);
  const auto& sv = s.pivot_singular_values;
  s.pivot_rank = 0;
  while (s.pivot_rank < sv.size() && sv(s.pivot_rank) > thr) {
    ++s.pivot_rank;
  }
  const Index r = s.pivot.rows();
  const Index c = s.pivot.cols();
  if (r == 0 && c == 0) {
    s.pivot_sigma_min = std::numeric_limits<double>::infinity();
    s.pivot_invertible = true;
  } else if (r != c) {
    s.pivot_sigma_min = 0.0;
    s.pivot_invertible = false;
  } else {
    s.pivot_sigma_min = sv(sv.size() - 1);
    s.pivot_invertible = s.pivot_sigma_min > thr;
    s.marginal = s.pivot_sigma_min > thr / 10.0 && s.pivot_sigma_min < 10.0 * thr;
  }
}

[[noreturn]] void fail_invariance(const std::string& what, double res, double thr) {
  throw InvarianceError(what + " (residual " + std::to_string(res) + ", threshold " +
                        std::to_string(thr) + ")");
}

} // namespace

template <class Scalar>
Subspace<Scalar> image_subspace(const Pencil<Scalar>& p, const Matrix<Scalar>& image,
                                const Tolerance& tol, const PencilNorms& norms) {
  // Rescale the reference so the threshold equals the one for A itself
  // although the image has fewer columns.
  const double ratio = static_cast<double>(std::max<Index>({p.rows(), p.cols(), 1})) /
                       static_cast<double>(std::max<Index>({p.rows(), image.cols(), 1}));
  return range_basis<Scalar>(image, tol, norms.a * ratio);
}

template <class Scalar>
ReductionStep<Scalar> observation_reduce(const Pencil<Scalar>& p, const Tolerance& tol,
                                         std::optional<PencilNorms> ref) {
  tol.validate();
  const PencilNorms norms = ref.value_or(PencilNorms::of(p));
  const Index m = p.rows();
  const Index n = p.cols();
  ReductionStep<Scalar> s;
  s.kind = ReductionKind::observation;
  s.parent_rows = m;
  s.parent_cols = n;
  s.threshold_e = tol.threshold(norms.e, m, n);
  s.threshold_a = tol.threshold(norms.a, m, n);

  s.codomain = range_basis<Scalar>(p.E(), tol, norms.e);
  s.domain = preimage_basis<Scalar>(p.A(), s.codomain, tol, norms.a);
  s.pivot_domain = s.domain.complement();
  s.pivot_codomain = s.codomain.complement();

  const auto e1 = induced_operator<Scalar>(p.E(), s.domain, s.codomain, tol, norms.e);
  const auto a1 = induced_operator<Scalar>(p.A(), s.domain, s.codomain, tol, norms.a);
  s.residual_e = e1.residual;
  s.residual_a = a1.residual;
  s.reduced = Pencil<Scalar>(e1.matrix, a1.matrix);

  // E maps everything into range E, so its quotient map vanishes.
  const Matrix<Scalar> wc_h = s.pivot_codomain.basis().adjoint();
  s.quotient_residual_e = operator_norm<Scalar>(Matrix<Scalar>(wc_h * p.E()));
  if (!(s.quotient_residual_e <= s.threshold_e)) {
    fail_invariance("observation_reduce: E leaves its own range", s.quotient_residual_e,
                    s.threshold_e);
  }

  s.pivot = wc_h * p.A() * s.pivot_domain.basis();
  finish_pivot(s, s.threshold_a);
  if (s.pivot_rank != s.pivot.cols()) {
    throw InconsistencyError("observation_reduce: pivot is not injective (rank " +
                             std::to_string(s.pivot_rank) + " of " +
                             std::to_string(s.pivot.cols()) + ")");
  }
  return s;
}

template <class Scalar>
ReductionStep<Scalar> control_reduce(const Pencil<Scalar>& p, const Tolerance& tol,
                                     std::optional<PencilNorms> ref) {
  tol.validate();
  const PencilNorms norms = ref.value_or(PencilNorms::of(p));
  const Index m = p.rows();
  const Index n = p.cols();
  ReductionStep<Scalar> s;
  s.kind = ReductionKind::control;
  s.parent_rows = m;
  s.parent_cols = n;
  s.threshold_e = tol.threshold(norms.e, m, n);
  s.threshold_a = tol.threshold(norms.a, m, n);

  const Subspace<Scalar> kernel = kernel_basis<Scalar>(p.E(), tol, norms.e);
  const Matrix<Scalar> image = p.A() * kernel.basis();
  const Subspace<Scalar> a_kernel = image_subspace(p, image, tol, norms);

  s.pivot_domain = kernel;
  s.pivot_codomain = a_kernel;
  s.domain = kernel.complement();
  s.codomain = a_kernel.complement();

  s.quotient_residual_e =
      kernel.dim() ? operator_norm<Scalar>(Matrix<Scalar>(p.E() * kernel.basis())) : 0.0;
  s.residual_e = s.quotient_residual_e;
  if (!(s.quotient_residual_e <= s.threshold_e)) {
    fail_invariance("control_reduce: E does not vanish on its kernel", s.quotient_residual_e,
                    s.threshold_e);
  }
  s.residual_a = a_kernel.residual(image);
  if (!(s.residual_a <= s.threshold_a)) {
    fail_invariance("control_reduce: A ker E is not captured by its range basis", s.residual_a,
                    s.threshold_a);
  }

  const Matrix<Scalar> codom_h = s.codomain.basis().adjoint();
  s.reduced = Pencil<Scalar>(codom_h * p.E() * s.domain.basis(),
                             codom_h * p.A() * s.domain.basis());
  s.pivot = a_kernel.basis().adjoint() * image;
  finish_pivot(s, s.threshold_a);
  if (s.pivot_rank != s.pivot.rows()) {
    throw InconsistencyError("control_reduce: pivot is not surjective (rank " +
                             std::to_string(s.pivot_rank) + " of " +
                             std::to_string(s.pivot.rows()) + ")");
  }
  return s;
}

template <class Scalar>
ReductionStep<Scalar> reduce(ReductionKind kind, const Pencil<Scalar>& p, const Tolerance& tol,
                             std::optional<PencilNorms> ref) {
  return kind == ReductionKind::observation ? observation_reduce(p, tol, ref)
                                            : control_reduce(p, tol, ref);
}

namespace {

template <class Scalar>
Index rank_of_e(const Pencil<Scalar>& p, const Tolerance& tol, std::optional<PencilNorms> ref) {
  if (p.is_zero_shaped()) {
    return 0;
  }
  const double scale = ref ? ref->e : operator_norm<Scalar>(p.E());
  const Eigen::VectorXd sv = singular_values<Scalar>(p.E());
  const double thr = tol.threshold(scale, p.rows(), p.cols());
  Index r = 0;
  while (r < sv.size() && sv(r) > thr) {
    ++r;
  }
  return r;
}

} // namespace

template <class Scalar>
bool is_irreducible(const Pencil<Scalar>& p, const Tolerance& tol,
                    std::optional<PencilNorms> ref) {
  const Index r = rank_of_e(p, tol, ref);
  return r == p.rows() && r == p.cols();
}

template <class Scalar>
bool is_observation_irreducible(const Pencil<Scalar>& p, const Tolerance& tol,
                                std::optional<PencilNorms> ref) {
  return rank_of_e(p, tol, ref) == p.rows();
}

template <class Scalar>
bool is_control_irreducible(const Pencil<Scalar>& p, const Tolerance& tol,
                            std::optional<PencilNorms> ref) {
  return rank_of_e(p, tol, ref) == p.cols();
}

namespace {

template <class Scalar, class Choose>
ReductionChain<Scalar> run_chain(const Pencil<Scalar>& p, Index max_steps,
                                 const Tolerance& tol, std::optional<PencilNorms> ref,
                                 Choose choose) {
  tol.validate();
  if (max_steps < 0) {
    throw InputError("reduction chain: max_steps must be nonnegative");
  }
  ReductionChain<Scalar> chain;
  chain.norms = ref.value_or(PencilNorms::of(p));
  Matrix<Scalar> dom = Matrix<Scalar>::Identity(p.cols(), p.cols());
  Matrix<Scalar> codom = Matrix<Scalar>::Identity(p.rows(), p.rows());
  const Pencil<Scalar>* current = &p;
  for (Index i = 0;; ++i) {
    const std::optional<ReductionKind> kind = choose(*current, i, chain.norms);
    if (!kind) {
      chain.exhausted = true;
      break;
    }
    if (i >= max_steps) {
      break;
    }
    auto step = reduce(*kind, *current, tol, chain.norms);
    dom = dom * step.domain.basis();
    codom = codom * step.codomain.basis();
    chain.domain_maps.push_back(dom);
    chain.codomain_maps.push_back(codom);
    chain.steps.push_back(std::move(step));
    current = &chain.steps.back().reduced;
  }
  return chain;
}

} // namespace

template <class Scalar>
ReductionChain<Scalar> reduce_chain(const Pencil<Scalar>& p,
                                    const std::vector<ReductionKind>& policy,
                                    Index max_steps, const Tolerance& tol,
                                    std::optional<PencilNorms> ref) {
  return run_chain(p, max_steps, tol, ref,
                   [&](const Pencil<Scalar>& q, Index i,
                       const PencilNorms& norms) -> std::optional<ReductionKind> {
                     if (policy.empty() || is_irreducible(q, tol, norms)) {
                       return std::nullopt;
                     }
                     return policy[static_cast<std::size_t>(i) % policy.size()];
                   });
}

template <class Scalar>
ReductionChain<Scalar> reduce_to_core(const Pencil<Scalar>& p, const Tolerance& tol,
                                      std::optional<Index> max_steps,
    std::optional<PencilNorms> ref) {
  // Each nontrivial step removes at least one row or one column.
  const Index limit = max_steps.value_or(p.rows() + p.cols() + 1);
  return run_chain(p, limit, tol, ref,
                   [&](const Pencil<Scalar>& q, Index,
                       const PencilNorms& norms) -> std::optional<ReductionKind> {
                     if (!is_observation_irreducible(q, tol, norms)) {
                       return ReductionKind::observation;
                     }
                     if (!is_control_irreducible(q, tol, norms)) {
                       return ReductionKind::control;
                     }
                     return std::nullopt;
                   });
}

template <class Scalar>
ReductionChain<Scalar> observation_chain(const Pencil<Scalar>& p, const Tolerance& tol,
                                         std::optional<Index> max_steps,
    std::optional<PencilNorms> ref) {
  const Index limit = max_steps.value_or(default_max_steps(p.rows(), p.cols()));
  return run_chain(p, limit, tol, ref,
                   [&](const Pencil<Scalar>& q, Index,
                       const PencilNorms& norms) -> std::optional<ReductionKind> {
                     if (is_observation_irreducible(q, tol, norms)) {
                       return std::nullopt;
                     }
                     return ReductionKind::observation;
                   });
}

template <class Scalar>
ReductionChain<Scalar> control_chain(const Pencil<Scalar>& p, const Tolerance& tol,
                                     std::optional<Index> max_steps,
    std::optional<PencilNorms> ref) {
  const Index limit = max_steps.value_or(default_max_steps(p.rows(), p.cols()));
  return run_chain(p, limit, tol, ref,
                   [&](const Pencil<Scalar>& q, Index,
                       const PencilNorms& norms) -> std::optional<ReductionKind> {
                     if (is_control_irreducible(q, tol, norms)) {
                       return std::nullopt;
                     }
                     return ReductionKind::control;
                   });
}

#define PENCILKIT_INSTANTIATE(S)                                                          \
  template struct ReductionStep<S>;                                                       \
  template struct ReductionChain<S>;                                                      \
  template Subspace<S> image_subspace<S>(const Pencil<S>&, const Matrix<S>&,              \
                                         const Tolerance&, const PencilNorms&);           \
  template ReductionStep<S> observation_reduce<S>(const Pencil<S>&, const Tolerance&,     \
                                                  std::optional<PencilNorms>);            \
  template ReductionStep<S> control_reduce<S>(const Pencil<S>&, const Tolerance&,         \
                                              std::optional<PencilNorms>);                \
  template ReductionStep<S> reduce<S>(ReductionKind, const Pencil<S>&, const Tolerance&,  \
                                      std::optional<PencilNorms>);                        \
  template bool is_irreducible<S>(const Pencil<S>&, const Tolerance&,                     \
                                  std::optional<PencilNorms>);                            \
  template bool is_observation_irreducible<S>(const Pencil<S>&, const Tolerance&,         \
                                              std::optional<PencilNorms>);                \
  template bool is_control_irreducible<S>(const Pencil<S>&, const Tolerance&,             \
                                          std::optional<PencilNorms>);                    \
  template ReductionChain<S> reduce_chain<S>(const Pencil<S>&,                            \
                                             const std::vector<ReductionKind>&, Index,    \
                                             const Tolerance&, std::optional<PencilNorms>);\
  template ReductionChain<S> reduce_to_core<S>(const Pencil<S>&, const Tolerance&,        \
                                               std::optional<Index>, std::optional<PencilNorms>);                     \
  template ReductionChain<S> observation_chain<S>(const Pencil<S>&, const Tolerance&,     \
                                                  std::optional<Index>, std::optional<PencilNorms>);                  \
  template ReductionChain<S> control_chain<S>(const Pencil<S>&, const Tolerance&,         \
                                              std::optional<Index>, std::optional<PencilNorms>);

PENCILKIT_INSTANTIATE(double)
PENCILKIT_INSTANTIATE(std::complex<double>)

#undef PENCILKIT_INSTANTIATE

} // namespace pencilkit
