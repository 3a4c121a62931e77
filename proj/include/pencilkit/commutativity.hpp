#pragma once

#include <string>
#include <vector>

#include "pencilkit/reduction.hpp"

namespace pencilkit {

/// The two one-step mixed reductions of a pencil, with the bases of the
/// reduced spaces embedded in the original ones.
template <class Scalar>
struct MixedReductions {
  PencilNorms norms;
  ReductionStep<Scalar> obs;        // observation first
  ReductionStep<Scalar> obs_ctrl;   // then control
  ReductionStep<Scalar> ctrl;       // control first
  ReductionStep<Scalar> ctrl_obs;   // then observation
  Matrix<Scalar> domain_oc;         // U*1^1 inside U
  Matrix<Scalar> codomain_oc;       // W*1^1 inside W
  Matrix<Scalar> domain_co;         // U^1*1 inside U (within (ker E)^perp)
  Matrix<Scalar> codomain_co;       // W^1*1 inside W (within (A ker E)^perp)
};

template <class Scalar>
MixedReductions<Scalar> mixed_reductions(const Pencil<Scalar>& p, const Tolerance& tol = {});

template <class Scalar>
struct CommutativityCertificate {
  Matrix<Scalar> JU;
  Matrix<Scalar> JW;
  double norm_JU = 0.0;
  double norm_JW = 0.0;
  double sigma_min_JU = 0.0;
  double sigma_min_JW = 0.0;
  /// Distance of the images of JU and JW from the target spaces.
  double image_residual_JU = 0.0;
  double image_residual_JW = 0.0;
  double intertwine_residual_E = 0.0;
  double intertwine_residual_A = 0.0;
  /// Bound the intertwining residuals are held to.
  double residual_bound = 0.0;
  bool equivalent = false;

  bool obs_pivot_invertible = false;       // [A*1]
  bool ctrl_obs_pivot_invertible = false;  // [A^1*1]
  bool ctrl_pivot_invertible = false;      // [A^1]
  bool obs_ctrl_pivot_invertible = false;  // [A*1^1]
  Index ctrl_pivot_kernel = 0;             // dim ker [A^1]
  Index obs_ctrl_pivot_kernel = 0;         // dim ker [A*1^1]
  bool pivot_equivalences_hold = false;
};

/// Natural map U*1 / ker E*1 -> U / ker E in the bases of the mixed
/// reductions. Throws InconsistencyError when it is not injective.
template <class Scalar>
Matrix<Scalar> build_JU(const Pencil<Scalar>& p, const Tolerance& tol = {});

/// Natural map W*1 / A ker E*1 -> W / A ker E, likewise.
template <class Scalar>
Matrix<Scalar> build_JW(const Pencil<Scalar>& p, const Tolerance& tol = {});

/// Never throws on mathematical failure; the certificate records it.
template <class Scalar>
CommutativityCertificate<Scalar> commute_check(const Pencil<Scalar>& p, const Tolerance& tol = {});

struct DimensionCheck {
  std::string name;
  /// Alternating sum of dimensions; zero when the relation holds.
  long long defect = 0;
};

/// Rows and columns of the two interwoven diagrams around one observation
/// and one control step, each dimension from its own rank decision.
template <class Scalar>
std::vector<DimensionCheck> interwoven_dimension_checks(const Pencil<Scalar>& p,
                                                        const Tolerance& tol = {});

} // namespace pencilkit
