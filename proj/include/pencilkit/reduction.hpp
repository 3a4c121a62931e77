#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "pencilkit/pencil.hpp"
#include "pencilkit/subspace.hpp"

namespace pencilkit {

enum class ReductionKind { observation, control };

std::string_view to_string(ReductionKind k);

/// One observation or control reduction of a pencil (E, A) : K^n -> K^m.
///
/// Observation: domain = U1 = A^-1(range E), codomain = W1 = range E, and
/// the pivot is the quotient map A : K^n / U1 -> K^m / W1, with the
/// quotients represented by the orthogonal complements pivot_domain and
/// pivot_codomain.
///
/// Control: domain = (ker E)^perp representing K^n / ker E, codomain =
/// (A ker E)^perp representing K^m / A ker E; the pivot is the restriction
/// of A from pivot_domain = ker E to pivot_codomain = A ker E.
///
/// In both cases reduced.E = codomain^H E domain and likewise for A, so the
/// projection of a control reduction is the adjoint of its stored basis.
template <class Scalar>
struct ReductionStep {
  ReductionKind kind = ReductionKind::observation;
  Index parent_rows = 0;
  Index parent_cols = 0;

  Subspace<Scalar> domain;
  Subspace<Scalar> codomain;
  Subspace<Scalar> pivot_domain;
  Subspace<Scalar> pivot_codomain;

  Pencil<Scalar> reduced;
  Matrix<Scalar> pivot;

  /// Singular values of the pivot, decreasing.
  Eigen::VectorXd pivot_singular_values;
  /// Distance of the pivot to the non-bijective maps: its smallest singular
  /// value when square and nonempty, +inf for the empty 0x0 pivot, 0 when
  /// the pivot is not square.
  double pivot_sigma_min = 0.0;
  Index pivot_rank = 0;
  bool pivot_invertible = false;
  /// Square nonempty pivot whose sigma_min lies within a factor 10 of the
  /// rank threshold.
  bool marginal = false;

  double threshold_e = 0.0;
  double threshold_a = 0.0;
  /// Well-definedness residuals of the reduced E and A.
  double residual_e = 0.0;
  double residual_a = 0.0;
  /// ||E|| on the quotient pair (observation) or on ker E (control); zero
  /// in exact arithmetic.
  double quotient_residual_e = 0.0;

  /// beta_* (dim coker of the pivot) for an observation step, beta^*
  /// (dim ker of the pivot) for a control step.
  Index defect() const;

  /// True when the step changes nothing: E surjective for observation,
  /// E injective for control.
  bool trivial() const {
    return reduced.rows() == parent_rows && reduced.cols() == parent_cols;
  }
};

/// Observation reduction. Rank decisions about E use the reference norm
/// ref.e and those about A use ref.a; both default to the norms of p.
/// Throws InvarianceError or InconsistencyError when rounding defeats the
/// construction (the tolerance is too tight for the input).
template <class Scalar>
ReductionStep<Scalar> observation_reduce(const Pencil<Scalar>& p, const Tolerance& tol = {},
                                         std::optional<PencilNorms> ref = {});

template <class Scalar>
ReductionStep<Scalar> control_reduce(const Pencil<Scalar>& p, const Tolerance& tol = {},
                                     std::optional<PencilNorms> ref = {});

template <class Scalar>
ReductionStep<Scalar> reduce(ReductionKind kind, const Pencil<Scalar>& p,
                             const Tolerance& tol = {}, std::optional<PencilNorms> ref = {});

/// E injective with full range. The 0x0 pencil is irreducible; m x 0 and
/// 0 x n pencils with m, n > 0 are not.
template <class Scalar>
bool is_irreducible(const Pencil<Scalar>& p, const Tolerance& tol = {},
                    std::optional<PencilNorms> ref = {});

/// E surjective: no observation reduction is possible.
template <class Scalar>
bool is_observation_irreducible(const Pencil<Scalar>& p, const Tolerance& tol = {},
                                std::optional<PencilNorms> ref = {});

/// E injective: no control reduction is possible.
template <class Scalar>
bool is_control_irreducible(const Pencil<Scalar>& p, const Tolerance& tol = {},
                            std::optional<PencilNorms> ref = {});

template <class Scalar>
struct ReductionChain {
  std::vector<ReductionStep<Scalar>> steps;
  /// domain_maps[i] maps the domain of the system after step i into the
  /// original domain (orthonormal columns); likewise for codomains.
  std::vector<Matrix<Scalar>> domain_maps;
  std::vector<Matrix<Scalar>> codomain_maps;
  PencilNorms norms;
  /// The chain ended because no further reduction of the requested kind
  /// was possible, not because max_steps ran out.
  bool exhausted = false;

  const Pencil<Scalar>& final_pencil(const Pencil<Scalar>& original) const {
    return steps.empty() ? original : steps.back().reduced;
  }
  bool all_pivots_invertible() const;
};

/// Applies reductions in policy order, repeating the policy cyclically,
/// until max_steps steps were taken or the system is irreducible. Every
/// rank decision uses the norms of the original pencil, or `ref` when given
/// (for pencils that are themselves reductions of a larger one).
template <class Scalar>
ReductionChain<Scalar> reduce_chain(const Pencil<Scalar>& p,
                                    const std::vector<ReductionKind>& policy,
                                    Index max_steps, const Tolerance& tol = {},
                                    std::optional<PencilNorms> ref = {});

/// Greedy chain to the irreducible core: observation while E is not
/// surjective, otherwise control while E is not injective.
template <class Scalar>
ReductionChain<Scalar> reduce_to_core(const Pencil<Scalar>& p, const Tolerance& tol = {},
                                      std::optional<Index> max_steps = {},
    std::optional<PencilNorms> ref = {});

/// Observation steps only, until E is surjective.
template <class Scalar>
ReductionChain<Scalar> observation_chain(const Pencil<Scalar>& p, const Tolerance& tol = {},
                                         std::optional<Index> max_steps = {},
    std::optional<PencilNorms> ref = {});

/// Control steps only, until E is injective.
template <class Scalar>
ReductionChain<Scalar> control_chain(const Pencil<Scalar>& p, const Tolerance& tol = {},
                                     std::optional<Index> max_steps = {},
    std::optional<PencilNorms> ref = {});

/// Range of `image` (A applied to some vectors) at the threshold used for
/// every rank decision about A in a pencil of p's shape.
template <class Scalar>
Subspace<Scalar> image_subspace(const Pencil<Scalar>& p, const Matrix<Scalar>& image,
                                const Tolerance& tol, const PencilNorms& norms);

/// min(m, n) + 1: enough reductions of one kind to exhaust any pencil.
Index default_max_steps(Index rows, Index cols);

// ---------------------------------------------------------------------------
// Normality and index-one diagnostics

struct NormalityDiagnostics {
  /// gap(range E + A ker E, range [E, A ker E]).
  double sum_gap = 0.0;
  /// gap(A ker E1, range E intersect A ker E), E1 the observation-reduced E.
  double int_gap = 0.0;
  bool normal = true;
};

template <class Scalar>
NormalityDiagnostics normality_check(const Pencil<Scalar>& p, const Tolerance& tol = {},
                                     std::optional<PencilNorms> ref = {});

struct IndexOneResult {
  bool index_one = false;
  /// dim(range E intersect A ker E); zero is the subspace criterion.
  Index intersection_dim = 0;
  /// The control-reduced E is injective.
  bool reduced_e_injective = false;
};

/// Evaluates range E intersect A ker E = 0 and injectivity of the
/// control-reduced E. Throws InconsistencyError when they disagree.
template <class Scalar>
IndexOneResult control_index_one(const Pencil<Scalar>& p, const Tolerance& tol = {},
                                 std::optional<PencilNorms> ref = {});

struct VariationalCheck {
  /// Hermitian part of A positive definite at tolerance.
  bool coercive = false;
  /// Empty when A is not coercive: the criterion does not apply.
  std::optional<bool> index_one;
};

/// E = D^H D with A coercive has control index one. Throws InputError when
/// A is not square or D has the wrong width, and InconsistencyError when a
/// coercive A yields a pencil without control index one.
template <class Scalar>
VariationalCheck variational_index_one_check(const Matrix<Scalar>& d, const Matrix<Scalar>& a,
                                             const Tolerance& tol = {});

/// Least beta >= 0 with Re <Eu, Au> <= beta ||Eu||^2 for all u, or empty
/// when no such beta exists. A finite bound forces control index one; a
/// contradiction throws InconsistencyError.
template <class Scalar>
std::optional<double> yagi_bound(const Pencil<Scalar>& p, const Tolerance& tol = {});

// ---------------------------------------------------------------------------
// Subspace identities of the first reduction step

/// Dimensions of the spaces around one observation and one control step,
/// each computed by its own rank decision.
struct StepDimensions {
  Index rows = 0;
  Index cols = 0;
  Index rank_e = 0;
  Index ker_e = 0;
  Index ker_e_obs = 0;          // ker of the observation-reduced E
  Index a_ker_e = 0;            // dim A ker E
  Index a_ker_e_obs = 0;        // dim A ker(E_obs), embedded
  Index range_e_cap_a_ker_e = 0;
  Index range_e_plus_a_ker_e = 0;
  Index obs_domain = 0;         // dim U1
  Index ctrl_rows = 0;          // dim of the control-reduced codomain
  Index ctrl_rank_e = 0;        // rank of the control-reduced E
};

template <class Scalar>
StepDimensions step_dimensions(const Pencil<Scalar>& p, const Tolerance& tol = {},
                               std::optional<PencilNorms> ref = {});

/// 0 -> ker E1 -> ker E -A-> coker E -> coker E^1 -> 0 (alternating sum of
/// dimensions), with E1 / E^1 the observation / control reduced E.
long long exact_sequence_defect(const StepDimensions& d);

/// dim coker E^1 - (m - dim(range E + A ker E)).
long long cokernel_identity_defect(const StepDimensions& d);

/// Gap between A ker E1 and range E intersect A ker E.
template <class Scalar>
double image_of_reduced_kernel_gap(const Pencil<Scalar>& p, const Tolerance& tol = {},
                                   std::optional<PencilNorms> ref = {});

} // namespace pencilkit
