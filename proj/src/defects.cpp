#include "pencilkit/defects.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include <Eigen/Eigenvalues>

namespace pencilkit {

std::string_view to_string(Termination t) {
  return t == Termination::exhausted ? "exhausted" : "max_steps";
}

std::vector<Index> trim_zeros(std::vector<Index> v) {
  while (!v.empty() && v.back() == 0) {
    v.pop_back();
  }
  return v;
}

namespace {

// alpha from an observation step already taken on p.
template <class Scalar>
Index alpha_of_step(const Pencil<Scalar>& p, const ReductionStep<Scalar>& obs,
                    const Tolerance& tol, const PencilNorms& norms) {
  // [E] in coordinates: W1-coordinates of E on the complement of U1, then
  // project out range(E1), which represents E(U1) inside W1.
  const Matrix<Scalar> e_on_quotient =
      obs.codomain.basis().adjoint() * p.E() * obs.pivot_domain.basis();
  const Subspace<Scalar> w2 = range_basis<Scalar>(obs.reduced.E(), tol, norms.e);
  const Matrix<Scalar> bracket = w2.complement().basis().adjoint() * e_on_quotient;
  const Index rank = bracket.size() ? numerical_rank<Scalar>(bracket, tol, norms.e) : 0;
  const Index alpha = bracket.cols() - rank;

  const Index ker_e = kernel_basis<Scalar>(p.E(), tol, norms.e).dim();
  const Index ker_e1 = kernel_basis<Scalar>(obs.reduced.E(), tol, norms.e).dim();
  if (alpha != ker_e - ker_e1) {
    throw InconsistencyError("alpha_defect: dim ker [E] = " + std::to_string(alpha) +
                             " but dim ker E - dim ker E1 = " + std::to_string(ker_e) + " - " +
                             std::to_string(ker_e1));
  }
  return alpha;
}

std::vector<Index> or_zero(std::vector<Index> v) {
  if (v.empty()) {
    v.push_back(0);
  }
  return v;
}

std::vector<Index> drop_first(const std::vector<Index>& v) {
  return v.size() > 1 ? std::vector<Index>(v.begin() + 1, v.end()) : std::vector<Index>{};
}

} // namespace

template <class Scalar>
Index alpha_defect(const Pencil<Scalar>& p, const Tolerance& tol,
                   std::optional<PencilNorms> ref) {
  const PencilNorms norms = ref.value_or(PencilNorms::of(p));
  return alpha_of_step(p, observation_reduce(p, tol, norms), tol, norms);
}

template <class Scalar>
Index beta_obs_defect(const Pencil<Scalar>& p, const Tolerance& tol,
                      std::optional<PencilNorms> ref) {
  return observation_reduce(p, tol, ref).defect();
}

template <class Scalar>
Index beta_ctrl_defect(const Pencil<Scalar>& p, const Tolerance& tol,
                       std::optional<PencilNorms> ref) {
  return control_reduce(p, tol, ref).defect();
}

template <class Scalar>
DefectProfile defect_profile(const Pencil<Scalar>& p, const Tolerance& tol,
                             std::optional<Index> max_steps, std::optional<PencilNorms> ref) {
  if (max_steps && *max_steps < 1) {
    throw InputError("defect_profile: max_steps must be at least 1");
  }
  const Index limit = max_steps.value_or(default_max_steps(p.rows(), p.cols()));
  DefectProfile out;

  const auto obs = observation_chain(p, tol, limit, ref);
  const Pencil<Scalar>* parent = &p;
  for (std::size_t i = 0; i < obs.steps.size(); ++i) {
    const auto& s = obs.steps[i];
    out.alpha.push_back(alpha_of_step(*parent, s, tol, obs.norms));
    out.beta_obs.push_back(s.defect());
    if (s.marginal) {
      out.marginal.push_back("observation " + std::to_string(i + 1));
    }
    parent = &s.reduced;
  }
  const auto ctrl = control_chain(p, tol, limit, ref);
  for (std::size_t i = 0; i < ctrl.steps.size(); ++i) {
    out.beta_ctrl.push_back(ctrl.steps[i].defect());
    if (ctrl.steps[i].marginal) {
      out.marginal.push_back("control " + std::to_string(i + 1));
    }
  }
  out.steps_obs = static_cast<Index>(obs.steps.size());
  out.steps_ctrl = static_cast<Index>(ctrl.steps.size());
  out.alpha = or_zero(out.alpha);
  out.beta_obs = or_zero(out.beta_obs);
  out.beta_ctrl = or_zero(out.beta_ctrl);

  const bool done = obs.exhausted && ctrl.exhausted;
  out.termination = done ? Termination::exhausted : Termination::max_steps;
  if (!done && limit >= default_max_steps(p.rows(), p.cols())) {
    throw InconsistencyError("defect_profile: chain not irreducible after " +
                             std::to_string(limit) + " steps");
  }
  const auto zero = [](Index b) { return b == 0; };
  out.regular = done && p.is_square() &&
                std::all_of(out.beta_obs.begin(), out.beta_obs.end(), zero) &&
                std::all_of(out.beta_ctrl.begin(), out.beta_ctrl.end(), zero);
  return out;
}

template <class Scalar>
ShiftLawResult shift_law_details(const Pencil<Scalar>& p, const Tolerance& tol) {
  const PencilNorms norms = PencilNorms::of(p);
  const DefectProfile whole = defect_profile(p, tol, {}, norms);
  ShiftLawResult r;

  const DefectProfile after_obs =
      defect_profile(observation_reduce(p, tol, norms).reduced, tol, {}, norms);
  r.observation_holds =
      trim_zeros(after_obs.alpha) == trim_zeros(drop_first(whole.alpha)) &&
      trim_zeros(after_obs.beta_obs) == trim_zeros(drop_first(whole.beta_obs)) &&
      trim_zeros(after_obs.beta_ctrl) == trim_zeros(whole.beta_ctrl);

  const DefectProfile after_ctrl =
      defect_profile(control_reduce(p, tol, norms).reduced, tol, {}, norms);
  r.control_holds =
      trim_zeros(after_ctrl.alpha) == trim_zeros(drop_first(whole.alpha)) &&
      trim_zeros(after_ctrl.beta_ctrl) == trim_zeros(drop_first(whole.beta_ctrl)) &&
      trim_zeros(after_ctrl.beta_obs) == trim_zeros(whole.beta_obs);
  return r;
}

template <class Scalar>
std::vector<std::complex<double>> core_eigenvalues(const Pencil<Scalar>& p,
                                                   const Tolerance& tol) {
  const auto chain = reduce_to_core(p, tol);
  if (!chain.exhausted) {
    throw InconsistencyError("core_eigenvalues: reduction to the core did not terminate");
  }
  const Pencil<Scalar>& core = chain.final_pencil(p);
  if (!core.is_square()) {
    throw InconsistencyError("core_eigenvalues: irreducible core is not square");
  }
  std::vector<std::complex<double>> out;
  if (core.rows() == 0) {
    return out;
  }
  using CMatrix = Matrix<std::complex<double>>;
  const CMatrix e = core.E().template cast<std::complex<double>>();
  const CMatrix a = core.A().template cast<std::complex<double>>();
  Eigen::PartialPivLU<CMatrix> lu(e);
  const double rcond = lu.rcond();
  if (!(rcond > tol.rel)) {
    throw InconsistencyError("core_eigenvalues: core E is numerically singular (rcond " +
                             std::to_string(rcond) + ")");
  }
  const CMatrix ode = -lu.solve(a);
  Eigen::ComplexEigenSolver<CMatrix> eig(ode, false);
  if (eig.info() != Eigen::Success) {
    throw InconsistencyError("core_eigenvalues: eigenvalue iteration failed");
  }
  for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
    out.push_back(eig.eigenvalues()(i));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

bool eigenvalue_multisets_match(const std::vector<std::complex<double>>& x,
                                const std::vector<std::complex<double>>& y, double rel) {
  if (x.size() != y.size()) {
    return false;
  }
  const std::size_t n = x.size();
  // Bipartite matching by augmenting paths.
  std::vector<int> match_y(n, -1);
  const auto close = [&](std::size_t i, std::size_t j) {
    return std::abs(x[i] - y[j]) <= rel * std::max(1.0, std::abs(x[i]));
  };
  std::function<bool(std::size_t, std::vector<bool>&)> augment =
      [&](std::size_t i, std::vector<bool>& seen) {
        for (std::size_t j = 0; j < n; ++j) {
          if (seen[j] || !close(i, j)) {
            continue;
          }
          seen[j] = true;
          if (match_y[j] < 0 || augment(static_cast<std::size_t>(match_y[j]), seen)) {
            match_y[j] = static_cast<int>(i);
            return true;
          }
        }
        return false;
      };
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> seen(n, false);
    if (!augment(i, seen)) {
      return false;
    }
  }
  return true;
}

template <class Scalar>
bool invariants_equal(const Pencil<Scalar>& p, const Pencil<Scalar>& q, const Tolerance& tol,
                      double spectrum_rel) {
  DefectProfile dp = defect_profile(p, tol);
  DefectProfile dq = defect_profile(q, tol);
  dp.marginal.clear();
  dq.marginal.clear();
  if (!(dp == dq)) {
    return false;
  }
  return eigenvalue_multisets_match(core_eigenvalues(p, tol), core_eigenvalues(q, tol),
                                    spectrum_rel);
}

#define PENCILKIT_INSTANTIATE(S)                                                          \
  template Index alpha_defect<S>(const Pencil<S>&, const Tolerance&,                      \
                                 std::optional<PencilNorms>);                             \
  template Index beta_obs_defect<S>(const Pencil<S>&, const Tolerance&,                   \
                                    std::optional<PencilNorms>);                          \
  template Index beta_ctrl_defect<S>(const Pencil<S>&, const Tolerance&,                  \
                                     std::optional<PencilNorms>);                         \
  template DefectProfile defect_profile<S>(const Pencil<S>&, const Tolerance&,            \
                                           std::optional<Index>, std::optional<PencilNorms>); \
  template ShiftLawResult shift_law_details<S>(const Pencil<S>&, const Tolerance&);       \
  template std::vector<std::complex<double>> core_eigenvalues<S>(const Pencil<S>&,        \
                                                                 const Tolerance&);       \
  template bool invariants_equal<S>(const Pencil<S>&, const Pencil<S>&, const Tolerance&, double);

PENCILKIT_INSTANTIATE(double)
PENCILKIT_INSTANTIATE(std::complex<double>)

#undef PENCILKIT_INSTANTIATE

} // namespace pencilkit
