#include "pencilkit/saddle.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "pencilkit/commutativity.hpp"
#include "pencilkit/pencil_io.hpp"
#include "pencilkit/reduction.hpp"

namespace pencilkit {

SaddleSpec SaddleSpec::make(Matrix<double> a0, Matrix<double> b, Matrix<double> rx,
                            Matrix<double> rm) {
  SaddleSpec s;
  const Index nx = a0.rows();
  s.A0 = std::move(a0);
  s.B = std::move(b);
  s.RX = rx.size() || nx == 0 ? std::move(rx) : Matrix<double>::Identity(nx, nx);
  s.RM = rm.size() || s.B.rows() == 0 ? std::move(rm)
                                      : Matrix<double>::Identity(s.B.rows(), s.B.rows());
  if (s.RX.size() == 0) {
    s.RX.resize(nx, nx);
  }
  if (s.RM.size() == 0) {
    s.RM.resize(s.B.rows(), s.B.rows());
  }
  return s;
}

namespace {

void require_spd(const Matrix<double>& m, const Tolerance& tol, const char* what) {
  if (m.rows() == 0) {
    return;
  }
  const double norm = operator_norm<double>(m);
  if ((m - m.transpose()).norm() > tol.threshold(norm, m.rows(), m.cols())) {
    throw InputError(std::string(what) + " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix<double>> eig(m, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues()(0) > tol.threshold(norm, m.rows(), m.cols()))) {
    throw InputError(std::string(what) + " is not positive definite");
  }
}

Matrix<double> inverse_sqrt(const Matrix<double>& m) {
  if (m.rows() == 0) {
    return m;
  }
  return Eigen::SelfAdjointEigenSolver<Matrix<double>>(m).operatorInverseSqrt();
}

} // namespace

void SaddleSpec::validate(const Tolerance& tol) const {
  tol.validate();
  const Index x = nx();
  if (A0.cols() != x) {
    throw InputError("saddle spec: A0 must be square");
  }
  if (B.cols() != x) {
    throw InputError("saddle spec: B has " + std::to_string(B.cols()) + " columns, expected " +
                     std::to_string(x));
  }
  if (RX.rows() != x || RX.cols() != x) {
    throw InputError("saddle spec: RX must be " + std::to_string(x) + " x " + std::to_string(x));
  }
  if (RM.rows() != nm() || RM.cols() != nm()) {
    throw InputError("saddle spec: RM must be " + std::to_string(nm()) + " x " +
                     std::to_string(nm()));
  }
  if (!A0.allFinite() || !B.allFinite() || !RX.allFinite() || !RM.allFinite()) {
    throw InputError("saddle spec: non-finite entries");
  }
  require_spd(RX, tol, "saddle spec: RX");
  require_spd(RM, tol, "saddle spec: RM");
}

SaddleSpec saddle_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("A0") || !j.contains("B")) {
    throw InputError("saddle spec: expected an object with A0 and B");
  }
  const auto& ja0 = j.at("A0");
  const auto& jb = j.at("B");
  if (!ja0.is_array() || !jb.is_array()) {
    throw InputError("saddle spec: A0 and B must be arrays of rows");
  }
  const Index nx = static_cast<Index>(ja0.size());
  const Index nm = static_cast<Index>(jb.size());
  Matrix<double> a0 = matrix_from_json<double>(ja0, nx, nx, "A0");
  Matrix<double> b = matrix_from_json<double>(jb, nm, nx, "B");
  Matrix<double> rx;
  Matrix<double> rm;
  if (j.contains("RX") && !j.at("RX").is_null()) {
    rx = matrix_from_json<double>(j.at("RX"), nx, nx, "RX");
  }
  if (j.contains("RM") && !j.at("RM").is_null()) {
    rm = matrix_from_json<double>(j.at("RM"), nm, nm, "RM");
  }
  SaddleSpec s = SaddleSpec::make(std::move(a0), std::move(b), std::move(rx), std::move(rm));
  s.validate();
  return s;
}

nlohmann::json saddle_to_json(const SaddleSpec& s) {
  return {{"A0", matrix_to_json<double>(s.A0)},
          {"B", matrix_to_json<double>(s.B)},
          {"RX", matrix_to_json<double>(s.RX)},
          {"RM", matrix_to_json<double>(s.RM)}};
}

Pencil<double> build_saddle_pencil(const SaddleSpec& s) {
  s.validate();
  const Index nx = s.nx();
  const Index n = nx + s.nm();
  Matrix<double> e = Matrix<double>::Zero(n, n);
  Matrix<double> a = Matrix<double>::Zero(n, n);
  e.topLeftCorner(nx, nx) = s.RX;
  a.topLeftCorner(nx, nx) = s.A0;
  a.topRightCorner(nx, s.nm()) = s.B.transpose();
  a.bottomLeftCorner(s.nm(), nx) = s.B;
  return Pencil<double>(std::move(e), std::move(a));
}

InfSupResult inf_sup_constant(const SaddleSpec& s, const Tolerance& tol) {
  const Pencil<double> p = build_saddle_pencil(s);
  InfSupResult r;
  const Index nx = s.nx();
  const Index nm = s.nm();
  const Matrix<double> whitened = inverse_sqrt(s.RX) * s.B.transpose() * inverse_sqrt(s.RM);
  r.threshold = tol.threshold(operator_norm<double>(whitened), nx, nm);
  if (nm == 0) {
    r.beta = std::numeric_limits<double>::infinity();
  } else if (nm > nx) {
    r.beta = 0.0;
  } else {
    const Eigen::VectorXd sv = singular_values<double>(whitened);
    r.beta = sv(sv.size() - 1);
  }
  r.satisfied = r.beta > r.threshold;

  const PencilNorms norms = PencilNorms::of(p);
  const auto obs = observation_reduce(p, tol, norms);
  const auto ctrl = control_reduce(p, tol, norms);
  r.pivot_sigma_min_obs = obs.pivot_sigma_min;
  r.pivot_sigma_min_ctrl = ctrl.pivot_sigma_min;
  if (r.satisfied != obs.pivot_invertible || r.satisfied != ctrl.pivot_invertible) {
    throw InconsistencyError(
        "inf_sup_constant: beta = " + std::to_string(r.beta) + (r.satisfied ? " > " : " <= ") +
        "threshold but the observation pivot is " +
        (obs.pivot_invertible ? "invertible" : "singular") + " and the control pivot is " +
        (ctrl.pivot_invertible ? "invertible" : "singular"));
  }
  return r;
}

namespace {

// ker B with the threshold the pencil's rank decisions use for A.
Subspace<double> kernel_of_b(const SaddleSpec& s, const PencilNorms& norms, const Tolerance& tol) {
  const Index n = s.nx() + s.nm();
  const double scale =
      norms.a * static_cast<double>(std::max<Index>(n, 1)) /
      static_cast<double>(std::max<Index>({s.nm(), s.nx(), 1}));
  if (s.nm() == 0) {
    return Subspace<double>::full(s.nx());
  }
  return kernel_basis<double>(s.B, tol, scale);
}

} // namespace

SaddleLadder saddle_reduction_ladder(const SaddleSpec& s, const Tolerance& tol) {
  const Pencil<double> p = build_saddle_pencil(s);
  const auto r = mixed_reductions(p, tol);
  SaddleLadder l;
  const Subspace<double> kb = kernel_of_b(s, r.norms, tol);
  l.ker_b = kb.dim();
  l.ker_b_basis = kb.basis();
  l.obs_domain = r.obs.domain.dim();
  l.obs_codomain = r.obs.codomain.dim();
  l.ker_e = r.ctrl.pivot_domain.dim();
  l.a_ker_e = r.ctrl.pivot_codomain.dim();
  l.obs_ctrl_domain = r.obs_ctrl.domain.dim();
  l.obs_ctrl_codomain = r.obs_ctrl.codomain.dim();
  l.ctrl_domain = r.ctrl.domain.dim();
  l.ctrl_codomain = r.ctrl.codomain.dim();
  l.ctrl_obs_domain = r.ctrl_obs.domain.dim();
  l.ctrl_obs_codomain = r.ctrl_obs.codomain.dim();
  l.consistent = l.obs_domain == l.ker_b + s.nm() && l.obs_ctrl_domain == l.ker_b &&
                 l.ctrl_obs_codomain == l.ker_b;
  return l;
}

SaddleSolveResult solve_saddle(const SaddleSpec& s, const Vector<double>& f,
                               const Tolerance& tol) {
  const Pencil<double> p = build_saddle_pencil(s);
  const Index nx = s.nx();
  const Index nm = s.nm();
  const Index n = nx + nm;
  if (f.size() != n) {
    throw InputError("solve_saddle: right-hand side has length " + std::to_string(f.size()) +
                     ", expected " + std::to_string(n));
  }
  SaddleSolveResult r;
  const PencilNorms norms = PencilNorms::of(p);
  if (n == 0) {
    r.direct_invertible = true;
  } else {
    const Eigen::VectorXd sv = singular_values<double>(p.A());
    r.direct_invertible = sv(sv.size() - 1) > tol.threshold(norms.a, n, n);
  }
  const InfSupResult infsup = inf_sup_constant(s, tol);
  r.inf_sup = infsup.satisfied;
  const Subspace<double> kb = kernel_of_b(s, norms, tol);
  const Matrix<double>& i = kb.basis();
  const Matrix<double> kernel_block = i.transpose() * s.A0 * i;
  if (kernel_block.rows() == 0) {
    r.kernel_block_invertible = true;
  } else {
    const Eigen::VectorXd sv = singular_values<double>(kernel_block);
    r.kernel_block_invertible =
        sv(sv.size() - 1) > tol.threshold(norms.a, kernel_block.rows(), kernel_block.cols());
  }
  r.invertible = r.inf_sup && r.kernel_block_invertible;
  r.verdicts_agree = r.invertible == r.direct_invertible;
  if (!r.inf_sup) {
    r.explanation += "inf-sup condition fails (beta = " + std::to_string(infsup.beta) + "); ";
  }
  if (!r.kernel_block_invertible) {
    r.explanation += "A0 restricted to ker B is singular; ";
  }
  if (!r.verdicts_agree) {
    r.explanation += "direct singular-value test disagrees; ";
  }
  if (!r.invertible || !r.verdicts_agree) {
    return r;
  }

  const Vector<double> fx = f.head(nx);
  const Vector<double> g = f.tail(nm);
  // Particular solution of B x = g, correction on ker B, then the
  // multiplier through the control pivot B^T.
  const Vector<double> xp =
      nm ? Vector<double>(s.B.completeOrthogonalDecomposition().solve(g)) : Vector<double>::Zero(nx);
  Vector<double> y = Vector<double>::Zero(i.cols());
  if (i.cols() > 0) {
    y = Eigen::PartialPivLU<Matrix<double>>(kernel_block).solve(i.transpose() * (fx - s.A0 * xp));
  }
  r.x = xp + i * y;
  const Vector<double> rest = fx - s.A0 * r.x;
  r.mu = nm ? Vector<double>(Matrix<double>(s.B.transpose()).completeOrthogonalDecomposition().solve(rest))
            : Vector<double>(0);
  Vector<double> u(n);
  u << r.x, r.mu;
  r.residual = (p.A() * u - f).norm();
  return r;
}

DiscreteExample example_multiplication_discrete(Index n_left, Index n_j, Index n_right,
                                                double h) {
  if (n_left < 0 || n_j < 0 || n_right < 0) {
    throw InputError("example_multiplication_discrete: negative grid size");
  }
  const Index n = n_left + n_j + n_right;
  if (n == 0) {
    throw InputError("example_multiplication_discrete: empty grid");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InputError("example_multiplication_discrete: h must be positive");
  }
  Matrix<double> e = Matrix<double>::Zero(n, n);
  Matrix<double> a = Matrix<double>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const bool in_j = i >= n_left && i < n_left + n_j;
    e(i, i) = in_j ? 0.0 : 1.0;
    a(i, i) = 1.0 / h;
    if (i > 0) {
      a(i, i - 1) = -1.0 / h;
    }
  }
  DiscreteExample ex;
  ex.pencil = Pencil<double>(std::move(e), std::move(a));
  ex.expected_control_steps = n_j > 0 ? 1 : 0;
  ex.expected_observation_steps = n_j > 0 ? 1 : 0;
  ex.expected_regular = true;
  ex.description =
      "E = multiplication by the indicator of the complement of J, A = backward difference. "
      "A is invertible, so every pivot is invertible and the pencil is regular: one control "
      "reduction (quotienting the J nodes) or one observation reduction reaches the core. "
      "A finite grid cannot be observation-reducible yet control-irreducible with invertible "
      "pivots; that behaviour needs the infinite-dimensional operator.";
  return ex;
}

SaddleSpec example_mixed_poisson(Index n) {
  if (n < 2) {
    throw InputError("example_mixed_poisson: need at least 2 cells");
  }
  const double h = 1.0 / static_cast<double>(n);
  const Index nx = n + 1;
  Matrix<double> mass = Matrix<double>::Zero(nx, nx);
  Matrix<double> stiff = Matrix<double>::Zero(nx, nx);
  Matrix<double> b = Matrix<double>::Zero(n, nx);
  for (Index c = 0; c < n; ++c) {
    mass(c, c) += h / 3.0;
    mass(c + 1, c + 1) += h / 3.0;
    mass(c, c + 1) += h / 6.0;
    mass(c + 1, c) += h / 6.0;
    stiff(c, c) += 1.0 / h;
    stiff(c + 1, c + 1) += 1.0 / h;
    stiff(c, c + 1) -= 1.0 / h;
    stiff(c + 1, c) -= 1.0 / h;
    b(c, c) = -1.0;
    b(c, c + 1) = 1.0;
  }
  return SaddleSpec::make(mass, b, mass + stiff, h * Matrix<double>::Identity(n, n));
}

} // namespace pencilkit
