#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pencilkit/reduction.hpp"

namespace pencilkit {

enum class Termination { exhausted, max_steps };

std::string_view to_string(Termination t);

/// Defect sequences of a pencil. Each sequence has one entry per nontrivial
/// reduction of its kind, and the single entry 0 when there is none.
struct DefectProfile {
  std::vector<Index> alpha;
  std::vector<Index> beta_obs;
  std::vector<Index> beta_ctrl;
  Index steps_obs = 0;
  Index steps_ctrl = 0;
  bool regular = false;
  Termination termination = Termination::exhausted;
  /// Pivots whose sigma_min sits within a factor 10 of the threshold, e.g.
  /// "observation 2".
  std::vector<std::string> marginal;

  friend bool operator==(const DefectProfile&, const DefectProfile&) = default;
};

/// Constraint defect alpha_1 = dim ker [E], [E] : U / U1 -> W1 / E(U1).
/// Cross-checked against dim ker E - dim ker E1; a mismatch throws
/// InconsistencyError.
template <class Scalar>
Index alpha_defect(const Pencil<Scalar>& p, const Tolerance& tol = {},
                   std::optional<PencilNorms> ref = {});

/// Cokernel dimension of the first observation pivot.
template <class Scalar>
Index beta_obs_defect(const Pencil<Scalar>& p, const Tolerance& tol = {},
                      std::optional<PencilNorms> ref = {});

/// Kernel dimension of the first control pivot.
template <class Scalar>
Index beta_ctrl_defect(const Pencil<Scalar>& p, const Tolerance& tol = {},
                       std::optional<PencilNorms> ref = {});

/// Runs the observation and the control chain. Throws InputError when
/// max_steps < 1 and InconsistencyError when a chain with at least
/// min(m, n) + 1 steps fails to reach irreducibility. `ref` fixes the rank
/// scale when p is itself the reduction of a larger pencil.
template <class Scalar>
DefectProfile defect_profile(const Pencil<Scalar>& p, const Tolerance& tol = {},
                             std::optional<Index> max_steps = {},
                             std::optional<PencilNorms> ref = {});

struct ShiftLawResult {
  bool observation_holds = true;
  bool control_holds = true;
  bool holds() const { return observation_holds && control_holds; }
};

/// Observation reduction drops the first alpha and beta_obs and keeps
/// beta_ctrl; control reduction drops the first alpha and beta_ctrl and keeps
/// beta_obs. Sequences are compared with trailing zeros removed.
template <class Scalar>
ShiftLawResult shift_law_details(const Pencil<Scalar>& p, const Tolerance& tol = {});

template <class Scalar>
bool shift_law_check(const Pencil<Scalar>& p, const Tolerance& tol = {}) {
  return shift_law_details(p, tol).holds();
}

/// Eigenvalues of -E_core^-1 A_core for the irreducible core, sorted by
/// real part, then imaginary part. Empty for an empty core.
template <class Scalar>
std::vector<std::complex<double>> core_eigenvalues(const Pencil<Scalar>& p,
                                                   const Tolerance& tol = {});

/// True when the two multisets can be matched with |x - y| <= rel * max(1, |x|).
bool eigenvalue_multisets_match(const std::vector<std::complex<double>>& x,
                                const std::vector<std::complex<double>>& y, double rel = 1e-6);

/// Necessary condition for equivalence: equal defect sequences and core
/// spectra matching within spectrum_rel. Not a decision procedure. An
/// eigenvalue in a Jordan block of size k moves by about eps^(1/k) under
/// rounding, hence the loose default.
template <class Scalar>
bool invariants_equal(const Pencil<Scalar>& p, const Pencil<Scalar>& q, const Tolerance& tol = {},
                      double spectrum_rel = 1e-4);

/// Drops trailing zeros.
std::vector<Index> trim_zeros(std::vector<Index> v);

} // namespace pencilkit
