#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pencilkit/reduction.hpp"

namespace pencilkit {

struct ResolventSample {
  std::complex<double> lambda;
  /// Smallest singular value of lambda E + A; 0 for non-square pencils,
  /// +inf for the empty pencil.
  double sigma_min = 0.0;
  double threshold = 0.0;
  bool member = false;
  /// "non-square" when membership fails for shape alone, else empty.
  std::string reason;
};

/// lambda E + A invertible: square and sigma_min > rel (|lambda| ||E|| + ||A||) n.
/// `ref` replaces the norms of p (use the parent's norms for reduced pencils).
template <class Scalar>
ResolventSample resolvent_member(const Pencil<Scalar>& p, std::complex<double> lambda,
                                 const Tolerance& tol = {}, std::optional<PencilNorms> ref = {});

/// lambda = 0 followed by `count` points uniform on the disk of radius
/// (||A|| + 1) / max(smallest nonzero singular value of E, 1).
template <class Scalar>
std::vector<std::complex<double>> sample_lambdas(const Pencil<Scalar>& p, std::size_t count,
                                                 std::uint64_t seed, const Tolerance& tol = {});

/// With an invertible pivot, p and the reduced pencil agree on membership
/// at every sample; with a non-invertible pivot no sample is a member of p.
/// Both memberships use the norms `ref` (default: those of p).
template <class Scalar>
bool resolvent_invariance_check(const Pencil<Scalar>& p, const ReductionStep<Scalar>& step,
                                const std::vector<std::complex<double>>& lambdas,
                                const Tolerance& tol = {}, std::optional<PencilNorms> ref = {});

/// Injectivity and surjectivity of S : X -> Y, its restriction
/// S' : X' -> Y' and the quotient map [S] : X / X' -> Y / Y', with the six
/// implications between them.
struct FiveLemmaPredicates {
  bool s_injective = false;
  bool s_surjective = false;
  bool restricted_injective = false;
  bool restricted_surjective = false;
  bool quotient_injective = false;
  bool quotient_surjective = false;
  /// i:   S injective => S' injective
  /// ii:  S surjective => [S] surjective
  /// iii: S surjective and [S] injective => S' surjective
  /// iv:  S' surjective and S injective => [S] injective
  /// v:   [S] surjective and S' surjective => S surjective
  /// vi:  [S] injective and S' injective => S injective
  std::array<bool, 6> implications{};
  bool all_hold() const;
};

/// Throws InvarianceError unless S maps x_sub into y_sub at tolerance.
template <class Scalar>
FiveLemmaPredicates five_lemma_predicates(const Matrix<Scalar>& s, const Subspace<Scalar>& x_sub,
                                          const Subspace<Scalar>& y_sub, const Tolerance& tol = {});

template <class Scalar>
struct LinearSolveResult {
  Vector<Scalar> u;
  /// A_op u = f has a unique solution.
  bool solvable = false;
  /// Solved by elimination along the reduction chain (else direct LU or
  /// least squares).
  bool via_chain = false;
  /// u is a least-squares solution of a singular system.
  bool least_squares = false;
  std::vector<double> pivot_sigma_min;
  double core_sigma_min = 0.0;
  double residual = 0.0;
  std::vector<std::string> warnings;
};

/// Solves A_op u = f through the reduction chain of (E_aux, A_op): all
/// pivots invertible makes A_op invertible exactly when the core A is.
/// Falls back to a direct solve with a warning when a pivot is singular.
template <class Scalar>
LinearSolveResult<Scalar> solve_linear(const Matrix<Scalar>& a_op, const Vector<Scalar>& f,
                                       const Matrix<Scalar>& e_aux, const Tolerance& tol = {});

/// One observation step of the extraction: the coordinates c of the
/// eliminated variables (u = eliminated c + ...) solve
/// pivot c = equations^H g, where g is the right-hand side of the system at
/// this step (f itself for the first layer; later layers also carry
/// derivatives of earlier eliminated variables).
template <class Scalar>
struct ConstraintLayer {
  Matrix<Scalar> eliminated;   // basis in the original domain
  Matrix<Scalar> equations;    // basis in the original codomain
  Matrix<Scalar> pivot;
  double pivot_sigma_min = 0.0;
};

template <class Scalar>
struct OdeExtract {
  /// -E_core^-1 A_core.
  Matrix<Scalar> ode_matrix;
  /// Core domain into the original domain.
  Matrix<Scalar> state_embedding;
  /// Core codomain into the original codomain.
  Matrix<Scalar> equation_embedding;
  std::vector<ConstraintLayer<Scalar>> constraints;
};

/// Observation reductions until E is invertible. Throws InputError when
/// the pencil is not regular.
template <class Scalar>
OdeExtract<Scalar> reduce_to_ode(const Pencil<Scalar>& p, const Tolerance& tol = {},
                                 std::optional<Index> max_steps = {});

/// Eigenvalues of the irreducible core; exactly the non-members of the
/// resolvent set. Throws InputError when the pencil is not regular.
template <class Scalar>
std::vector<std::complex<double>> core_spectrum(const Pencil<Scalar>& p, const Tolerance& tol = {});

} // namespace pencilkit
