#include "pencilkit/spectrum.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "pencilkit/defects.hpp"

namespace pencilkit {

template <class Scalar>
ResolventSample resolvent_member(const Pencil<Scalar>& p, std::complex<double> lambda,
                                 const Tolerance& tol, std::optional<PencilNorms> ref) {
  tol.validate();
  ResolventSample s;
  s.lambda = lambda;
  if (!p.is_square()) {
    s.reason = "non-square";
    return s;
  }
  const Index n = p.rows();
  if (n == 0) {
    s.sigma_min = std::numeric_limits<double>::infinity();
    s.member = true;
    return s;
  }
  const PencilNorms norms = ref.value_or(PencilNorms::of(p));
  using C = std::complex<double>;
  const Matrix<C> m = lambda * p.E().template cast<C>() + p.A().template cast<C>();
  const Eigen::VectorXd sv = singular_values<C>(m);
  s.sigma_min = sv(sv.size() - 1);
  s.threshold = std::max(tol.abs_floor,
                         tol.rel * (std::abs(lambda) * norms.e + norms.a) * static_cast<double>(n));
  s.member = s.sigma_min > s.threshold;
  return s;
}

template <class Scalar>
std::vector<std::complex<double>> sample_lambdas(const Pencil<Scalar>& p, std::size_t count,
                                                 std::uint64_t seed, const Tolerance& tol) {
  const PencilNorms norms = PencilNorms::of(p);
  const Eigen::VectorXd sv = singular_values<Scalar>(p.E());
  const double thr = tol.threshold(norms.e, p.rows(), p.cols());
  double smallest = 0.0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > thr) {
      smallest = sv(i);
    }
  }
  const double radius = (norms.a + 1.0) / std::max(smallest, 1.0);
  // Fixed bit-to-double conversion keeps samples identical across standard
  // libraries.
  std::mt19937_64 rng(seed);
  const auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  std::vector<std::complex<double>> out{0.0};
  for (std::size_t i = 0; i < count; ++i) {
    const double r = radius * std::sqrt(unit());
    const double t = 2.0 * std::numbers::pi * unit();
    out.push_back(std::polar(r, t));
  }
  return out;
}

template <class Scalar>
bool resolvent_invariance_check(const Pencil<Scalar>& p, const ReductionStep<Scalar>& step,
                                const std::vector<std::complex<double>>& lambdas,
                                const Tolerance& tol, std::optional<PencilNorms> ref) {
  const PencilNorms norms = ref.value_or(PencilNorms::of(p));
  for (const auto& lambda : lambdas) {
    const bool parent = resolvent_member(p, lambda, tol, norms).member;
    if (step.pivot_invertible) {
      if (parent != resolvent_member(step.reduced, lambda, tol, norms).member) {
        return false;
      }
    } else if (parent) {
      return false;
    }
  }
  return true;
}

bool FiveLemmaPredicates::all_hold() const {
  for (bool b : implications) {
    if (!b) {
      return false;
    }
  }
  return true;
}

template <class Scalar>
FiveLemmaPredicates five_lemma_predicates(const Matrix<Scalar>& s, const Subspace<Scalar>& x_sub,
                                          const Subspace<Scalar>& y_sub, const Tolerance& tol) {
  tol.validate();
  if (x_sub.ambient_dim() != s.cols() || y_sub.ambient_dim() != s.rows()) {
    throw InputError("five_lemma_predicates: subspace dimensions do not match S");
  }
  const double scale = operator_norm<Scalar>(s);
  const auto restricted = induced_operator<Scalar>(s, x_sub, y_sub, tol, scale);
  const auto quotient = quotient_operator<Scalar>(s, x_sub, y_sub, tol, scale);
  const auto rank = [&](const Matrix<Scalar>& m) {
    return m.size() ? numerical_rank<Scalar>(m, tol, scale) : Index{0};
  };
  FiveLemmaPredicates f;
  const Index rs = rank(s);
  const Index rr = rank(restricted.matrix);
  const Index rq = rank(quotient.matrix);
  f.s_injective = rs == s.cols();
  f.s_surjective = rs == s.rows();
  f.restricted_injective = rr == restricted.matrix.cols();
  f.restricted_surjective = rr == restricted.matrix.rows();
  f.quotient_injective = rq == quotient.matrix.cols();
  f.quotient_surjective = rq == quotient.matrix.rows();
  const auto implies = [](bool a, bool b) { return !a || b; };
  f.implications = {
      implies(f.s_injective, f.restricted_injective),
      implies(f.s_surjective, f.quotient_surjective),
      implies(f.s_surjective && f.quotient_injective, f.restricted_surjective),
      implies(f.restricted_surjective && f.s_injective, f.quotient_injective),
      implies(f.quotient_surjective && f.restricted_surjective, f.s_surjective),
      implies(f.quotient_injective && f.restricted_injective, f.s_injective),
  };
  return f;
}

namespace {

template <class Scalar>
double smallest_singular_value(const Matrix<Scalar>& m) {
  if (m.rows() == 0 && m.cols() == 0) {
    return std::numeric_limits<double>::infinity();
  }
  if (m.rows() != m.cols()) {
    return 0.0;
  }
  const Eigen::VectorXd sv = singular_values<Scalar>(m);
  return sv(sv.size() - 1);
}

template <class Scalar>
Vector<Scalar> square_solve(const Matrix<Scalar>& m, const Vector<Scalar>& b) {
  if (m.rows() == 0) {
    return Vector<Scalar>(0);
  }
  return Eigen::PartialPivLU<Matrix<Scalar>>(m).solve(b);
}

template <class Scalar>
void direct_solve(LinearSolveResult<Scalar>& r, const Matrix<Scalar>& a, const Vector<Scalar>& f,
                  const Tolerance& tol) {
  const double norm = operator_norm<Scalar>(a);
  const double smin = smallest_singular_value<Scalar>(a);
  if (smin > tol.threshold(norm, a.rows(), a.cols())) {
    r.u = square_solve<Scalar>(a, f);
    r.solvable = true;
  } else {
    r.u = a.size() ? Vector<Scalar>(a.completeOrthogonalDecomposition().solve(f))
                   : Vector<Scalar>::Zero(a.cols());
    r.solvable = false;
    r.least_squares = true;
  }
}

} // namespace

template <class Scalar>
LinearSolveResult<Scalar> solve_linear(const Matrix<Scalar>& a_op, const Vector<Scalar>& f,
                                       const Matrix<Scalar>& e_aux, const Tolerance& tol) {
  tol.validate();
  if (a_op.rows() != a_op.cols()) {
    throw InputError("solve_linear: A must be square");
  }
  if (e_aux.rows() != a_op.rows() || e_aux.cols() != a_op.cols()) {
    throw InputError("solve_linear: E must have the shape of A");
  }
  if (f.size() != a_op.rows()) {
    throw InputError("solve_linear: right-hand side has length " + std::to_string(f.size()) +
                     ", expected " + std::to_string(a_op.rows()));
  }
  LinearSolveResult<Scalar> r;
  const Pencil<Scalar> p(e_aux, a_op);
  const auto chain = reduce_to_core(p, tol);
  for (const auto& s : chain.steps) {
    r.pivot_sigma_min.push_back(s.pivot_sigma_min);
  }
  if (!chain.exhausted || !chain.all_pivots_invertible()) {
    r.warnings.push_back(
        "a pivot is not invertible; the chain says nothing about A, solved directly");
    direct_solve(r, a_op, f, tol);
    r.residual = a_op.size() ? (a_op * r.u - f).norm() : 0.0;
    return r;
  }
  const Pencil<Scalar>& core = chain.final_pencil(p);
  r.core_sigma_min = smallest_singular_value<Scalar>(core.A());
  const double core_thr = tol.threshold(chain.norms.a, core.rows(), core.cols());
  if (!(r.core_sigma_min > core_thr)) {
    r.warnings.push_back("core A is singular with all pivots invertible, so A is singular");
    direct_solve(r, a_op, f, tol);
    r.solvable = false;
    r.least_squares = true;
    r.residual = a_op.size() ? (a_op * r.u - f).norm() : 0.0;
    return r;
  }

  // Block back substitution: each step puts A in block upper triangular form
  // with the pivot and the reduced A on the diagonal.
  std::function<Vector<Scalar>(std::size_t, const Pencil<Scalar>&, const Vector<Scalar>&)> solve =
      [&](std::size_t level, const Pencil<Scalar>& q, const Vector<Scalar>& g) -> Vector<Scalar> {
    if (level == chain.steps.size()) {
      return square_solve<Scalar>(q.A(), g);
    }
    const auto& s = chain.steps[level];
    const Matrix<Scalar>& piv_dom = s.pivot_domain.basis();
    const Matrix<Scalar>& piv_cod = s.pivot_codomain.basis();
    const Matrix<Scalar>& dom = s.domain.basis();
    const Matrix<Scalar>& cod = s.codomain.basis();
    if (s.kind == ReductionKind::observation) {
      const Vector<Scalar> xc = square_solve<Scalar>(s.pivot, piv_cod.adjoint() * g);
      const Vector<Scalar> g1 = cod.adjoint() * (g - q.A() * (piv_dom * xc));
      const Vector<Scalar> x1 = solve(level + 1, s.reduced, g1);
      return dom * x1 + piv_dom * xc;
    }
    const Vector<Scalar> xd = solve(level + 1, s.reduced, cod.adjoint() * g);
    const Vector<Scalar> xk =
        square_solve<Scalar>(s.pivot, piv_cod.adjoint() * (g - q.A() * (dom * xd)));
    return piv_dom * xk + dom * xd;
  };
  r.u = solve(0, p, f);
  r.solvable = true;
  r.via_chain = true;
  r.residual = a_op.size() ? (a_op * r.u - f).norm() : 0.0;
  return r;
}

template <class Scalar>
OdeExtract<Scalar> reduce_to_ode(const Pencil<Scalar>& p, const Tolerance& tol,
                                 std::optional<Index> max_steps) {
  const DefectProfile prof = defect_profile(p, tol);
  if (!prof.regular) {
    std::string where = p.is_square() ? "" : "pencil is not square; ";
    for (std::size_t i = 0; i < prof.beta_obs.size(); ++i) {
      if (prof.beta_obs[i] != 0) {
        where += "beta_obs[" + std::to_string(i + 1) + "] = " + std::to_string(prof.beta_obs[i]) + "; ";
      }
    }
    for (std::size_t i = 0; i < prof.beta_ctrl.size(); ++i) {
      if (prof.beta_ctrl[i] != 0) {
        where += "beta_ctrl[" + std::to_string(i + 1) + "] = " + std::to_string(prof.beta_ctrl[i]) + "; ";
      }
    }
    throw InputError("reduce_to_ode: pencil is not regular (" + where + "no ODE exists)");
  }
  const auto chain = observation_chain(p, tol, max_steps);
  if (!chain.exhausted) {
    throw InconsistencyError("reduce_to_ode: observation chain did not terminate");
  }
  OdeExtract<Scalar> out;
  Matrix<Scalar> dom = Matrix<Scalar>::Identity(p.cols(), p.cols());
  Matrix<Scalar> cod = Matrix<Scalar>::Identity(p.rows(), p.rows());
  for (std::size_t i = 0; i < chain.steps.size(); ++i) {
    const auto& s = chain.steps[i];
    ConstraintLayer<Scalar> layer;
    layer.eliminated = dom * s.pivot_domain.basis();
    layer.equations = cod * s.pivot_codomain.basis();
    layer.pivot = s.pivot;
    layer.pivot_sigma_min = s.pivot_sigma_min;
    out.constraints.push_back(std::move(layer));
    dom = chain.domain_maps[i];
    cod = chain.codomain_maps[i];
  }
  out.state_embedding = dom;
  out.equation_embedding = cod;
  const Pencil<Scalar>& core = chain.final_pencil(p);
  if (!core.is_square()) {
    throw InconsistencyError("reduce_to_ode: core of a regular pencil is not square");
  }
  const double smin = smallest_singular_value<Scalar>(core.E());
  if (!(smin > tol.threshold(chain.norms.e, core.rows(), core.cols()))) {
    throw InconsistencyError("reduce_to_ode: core E is not invertible");
  }
  out.ode_matrix = core.rows() ? Matrix<Scalar>(-Eigen::PartialPivLU<Matrix<Scalar>>(core.E())
                                                     .solve(core.A()))
                               : Matrix<Scalar>(0, 0);
  return out;
}

template <class Scalar>
std::vector<std::complex<double>> core_spectrum(const Pencil<Scalar>& p, const Tolerance& tol) {
  if (!defect_profile(p, tol).regular) {
    throw InputError("core_spectrum: pencil is not regular, its spectrum is the whole plane");
  }
  return core_eigenvalues(p, tol);
}

#define PENCILKIT_INSTANTIATE(S)                                                          \
  template ResolventSample resolvent_member<S>(const Pencil<S>&, std::complex<double>,    \
                                               const Tolerance&, std::optional<PencilNorms>); \
  template std::vector<std::complex<double>> sample_lambdas<S>(const Pencil<S>&,          \
                                                               std::size_t, std::uint64_t, \
                                                               const Tolerance&);         \
  template bool resolvent_invariance_check<S>(const Pencil<S>&, const ReductionStep<S>&,  \
                                              const std::vector<std::complex<double>>&,   \
                                              const Tolerance&, std::optional<PencilNorms>); \
  template FiveLemmaPredicates five_lemma_predicates<S>(const Matrix<S>&,                 \
                                                        const Subspace<S>&,               \
                                                        const Subspace<S>&,               \
                                                        const Tolerance&);                \
  template LinearSolveResult<S> solve_linear<S>(const Matrix<S>&, const Vector<S>&,       \
                                                const Matrix<S>&, const Tolerance&);      \
  template OdeExtract<S> reduce_to_ode<S>(const Pencil<S>&, const Tolerance&,             \
                                          std::optional<Index>);                          \
  template std::vector<std::complex<double>> core_spectrum<S>(const Pencil<S>&,           \
                                                              const Tolerance&);

PENCILKIT_INSTANTIATE(double)
PENCILKIT_INSTANTIATE(std::complex<double>)

#undef PENCILKIT_INSTANTIATE

} // namespace pencilkit
