#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "pencilkit/pencil.hpp"
#include "pencilkit/subspace.hpp"

namespace pencilkit {

/// Saddle-point data on U = X x M. Real only.
struct SaddleSpec {
  Matrix<double> A0;  // nx x nx
  Matrix<double> B;   // nm x nx
  Matrix<double> RX;  // Riesz map of X, SPD
  Matrix<double> RM;  // Gram matrix of M, SPD

  Index nx() const { return A0.rows(); }
  Index nm() const { return B.rows(); }

  /// Fills RX and RM with identities when empty.
  static SaddleSpec make(Matrix<double> a0, Matrix<double> b, Matrix<double> rx = {},
                         Matrix<double> rm = {});

  /// Throws InputError on shape mismatch or non-SPD Riesz maps.
  void validate(const Tolerance& tol = {}) const;
};

/// {"A0": [[...]], "B": [[...]] or [], "RX": optional, "RM": optional}.
/// B = [] means M = 0.
SaddleSpec saddle_from_json(const nlohmann::json& j);
nlohmann::json saddle_to_json(const SaddleSpec& s);

/// E = [[RX, 0], [0, 0]], A = [[A0, B^T], [B, 0]].
Pencil<double> build_saddle_pencil(const SaddleSpec& s);

struct InfSupResult {
  /// inf over mu of sup over v of <B^T mu, v> / (|mu|_M |v|_X); 0 when
  /// dim M > dim X, +inf when M = 0.
  double beta = 0.0;
  double threshold = 0.0;
  bool satisfied = false;
  double pivot_sigma_min_obs = 0.0;
  double pivot_sigma_min_ctrl = 0.0;
};

/// Whitened singular values of B^T. Throws InconsistencyError when beta,
/// the observation pivot and the control pivot disagree on invertibility.
InfSupResult inf_sup_constant(const SaddleSpec& s, const Tolerance& tol = {});

struct SaddleLadder {
  Index ker_b = 0;
  Index obs_domain = 0;       // U*1 = ker B x M
  Index obs_codomain = 0;     // W*1 = X*
  Index ker_e = 0;            // M
  Index a_ker_e = 0;          // B^T M
  Index obs_ctrl_domain = 0;  // U*1^1 = ker B
  Index obs_ctrl_codomain = 0;
  Index ctrl_domain = 0;      // U^1 = X
  Index ctrl_codomain = 0;
  Index ctrl_obs_domain = 0;  // U^1*1 = ker B
  Index ctrl_obs_codomain = 0;  // W^1*1 = (ker B)*
  Matrix<double> ker_b_basis;
  /// dim U*1 = dim ker B + dim M, dim U*1^1 = dim ker B,
  /// dim W^1*1 = dim ker B.
  bool consistent = false;
};

SaddleLadder saddle_reduction_ladder(const SaddleSpec& s, const Tolerance& tol = {});

struct SaddleSolveResult {
  bool invertible = false;
  /// sigma_min of the assembled A above threshold.
  bool direct_invertible = false;
  bool inf_sup = false;
  /// i^T A0 i invertible, i a basis of ker B.
  bool kernel_block_invertible = false;
  bool verdicts_agree = false;
  /// Why A is singular, empty otherwise.
  std::string explanation;
  Vector<double> x;
  Vector<double> mu;
  double residual = 0.0;
};

/// Solves [[A0, B^T], [B, 0]] (x, mu) = f by the reduction chain: x on
/// ker B plus a particular solution, then mu through B^T. f has length
/// nx + nm.
SaddleSolveResult solve_saddle(const SaddleSpec& s, const Vector<double>& f,
                               const Tolerance& tol = {});

struct DiscreteExample {
  Pencil<double> pencil;
  Index expected_control_steps = 0;
  Index expected_observation_steps = 0;
  bool expected_regular = true;
  std::string description;
};

/// Nodes of a 1-D grid split into left, J and right parts: E multiplies by
/// the indicator of the complement of J, A is the backward difference
/// (u_i - u_{i-1}) / h with u_{-1} = 0.
DiscreteExample example_multiplication_discrete(Index n_left, Index n_j, Index n_right,
                                                double h);

/// 1-D mixed Poisson on n cells: sigma piecewise linear (n + 1 values),
/// u piecewise constant (n values). A0 is the P1 mass matrix, B the cell
/// divergence, RX the H(div) Gram matrix (mass + stiffness), RM = h I.
SaddleSpec example_mixed_poisson(Index n);

} // namespace pencilkit
