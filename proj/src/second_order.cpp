#include "sensas/second_order.hpp"

#include "parallel.hpp"
#include "sensas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sensas {

std::string_view to_string(HessianMethod method) {
  switch (method) {
    case HessianMethod::so_fsap: return "SO-FSAP";
    case HessianMethod::so_asap: return "SO-ASAP";
    case HessianMethod::fd: return "FD";
  }
  return "?";
}

double max_asymmetry(const Matrix& h) {
  double worst = 0.0;
  for (Index i = 0; i < h.rows(); ++i) {
    for (Index j = i + 1; j < h.cols(); ++j) worst = std::max(worst, std::abs(h(i, j) - h(j, i)));
  }
  return worst;
}

namespace {

void check_row_index(const NominalSystem& sys, Index i) {
  if (i < 0 || i >= sys.parameter_count()) {
    throw IndexError("row index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(sys.parameter_count()) + ")");
  }
}

HessianMatrix finish(Matrix values, HessianMethod method, const HessianOptions& options, const SolveLedger& ledger) {
  HessianMatrix out;
  out.method = method;
  out.asymmetry = max_asymmetry(values);
  if (options.symmetrize) {
    values = (0.5 * (values + values.transpose())).eval();
    out.symmetrized = true;
  }
  out.values = std::move(values);
  out.ledger = ledger;
  return out;
}

}  // namespace

namespace {

// Quantities every row shares, computed once per Hessian.
struct SharedTerms {
  Matrix hess_uu;
  Matrix hess_alpha_u;
  std::vector<Vector> state_rhs;    // dQ_j - dL_j u0
  std::vector<Vector> adjoint_rhs;  // D_alpha_j D_u R - dL_j^T psi0
};

SharedTerms shared_terms(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0) {
  const Problem& problem = sys.problem();
  const Vector& a = sys.alpha();
  const Index n = sys.parameter_count();
  SharedTerms t;
  t.hess_uu = problem.response.hess_uu(u0.values, a);
  t.hess_alpha_u = problem.response.hess_alpha_u(u0.values, a);
  t.state_rhs.reserve(static_cast<std::size_t>(n));
  t.adjoint_rhs.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    t.state_rhs.push_back(sys.dQ(j) - sys.dL(j) * u0.values);
    // The Lambda term is (dL/dalpha_j)^T psi0.
    t.adjoint_rhs.push_back(t.hess_alpha_u.col(j) - sys.dL(j).transpose() * psi0.values);
  }
  return t;
}

SassSources sources_from(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0,
                         const SharedTerms& t, Index i) {
  const auto& hooks = sys.problem().concomitant;
  SassSources s;
  s.grad_psi = t.state_rhs[static_cast<std::size_t>(i)] - hooks.eval_grad_psi_of_dP(u0.values, psi0.values, sys.alpha(), i);
  s.grad_u = t.adjoint_rhs[static_cast<std::size_t>(i)] - hooks.eval_grad_u_of_dP(u0.values, psi0.values, sys.alpha(), i);
  return s;
}

SassPair solve_from(const NominalSystem& sys, const SassSources& sources, const Matrix& hess_uu, Index i,
                    SolveLedger& ledger) {
  SassPair pair;
  pair.row_index = i;
  pair.psi2.values = solve_forward(sys.factorization(), sources.grad_psi, SolveKind::sensitivity, ledger);
  const Vector rhs = sources.grad_u + hess_uu.transpose() * pair.psi2.values;
  pair.psi1.values = solve_adjoint(sys.factorization(), rhs, ledger);
  return pair;
}

Vector indirect_from(const NominalSystem& sys, const StateVector& u0, const SharedTerms& t, const SassPair& pair) {
  const Index n = sys.parameter_count();
  Vector row(n);
  for (Index j = 0; j < n; ++j) {
    const auto slot = static_cast<std::size_t>(j);
    row[j] = pair.psi1.values.dot(t.state_rhs[slot]) + pair.psi2.values.dot(t.adjoint_rhs[slot]);
  }
  row -= sys.problem().concomitant.eval_p2_row(u0.values, sys.alpha(), pair.psi1.values, pair.psi2.values,
                                               pair.row_index);
  return row;
}

}  // namespace

SassSources sass_sources(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0, Index i) {
  check_row_index(sys, i);
  return sources_from(sys, u0, psi0, shared_terms(sys, u0, psi0), i);
}

SassPair sass_solve(const NominalSystem& sys, const StateVector& u0, const SassSources& sources, Index i,
                    SolveLedger& ledger) {
  check_row_index(sys, i);
  return solve_from(sys, sources, sys.problem().response.hess_uu(u0.values, sys.alpha()), i, ledger);
}

Vector direct_effect_row(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0, Index i) {
  check_row_index(sys, i);
  const Problem& problem = sys.problem();
  const Vector& a = sys.alpha();
  const Vector& u = u0.values;
  const Vector& psi = psi0.values;
  const Index n = sys.parameter_count();

  Vector row = problem.response.hess_alpha_alpha(u, a).row(i).transpose();
  for (Index j = 0; j < n; ++j) {
    row[j] += psi.dot(problem.source.d2(a, j, i) - problem.op.d2(a, j, i) * u);
  }
  row -= problem.concomitant.eval_d2P_dalpha_row(u, psi, a, i);
  return row;
}

Vector indirect_effect_row(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0,
                           const SassPair& pair) {
  check_row_index(sys, pair.row_index);
  return indirect_from(sys, u0, shared_terms(sys, u0, psi0), pair);
}

HessianMatrix so_asap_hessian(NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0,
                              const HessianOptions& options) {
  const Index n = sys.parameter_count();
  const SharedTerms t = shared_terms(sys, u0, psi0);
  Matrix h(n, n);
  std::vector<SolveLedger> charged(static_cast<std::size_t>(n));
  detail::for_each_index(sys.execution(), n, [&](Index i) {
    const SassSources sources = sources_from(sys, u0, psi0, t, i);
    const SassPair pair = solve_from(sys, sources, t.hess_uu, i, charged[static_cast<std::size_t>(i)]);
    h.row(i) = (direct_effect_row(sys, u0, psi0, i) + indirect_from(sys, u0, t, pair)).transpose();
  });
  sys.ledger() += detail::merge(charged);
  return finish(std::move(h), HessianMethod::so_asap, options, sys.ledger());
}

HessianMatrix so_asap_hessian(const Problem& problem, const HessianOptions& options, Execution exec) {
  NominalSystem sys(problem, exec);
  const StateVector u0 = evaluate_nominal(sys);
  const AdjointVector psi0 = adjoint_solve(sys, u0);
  return so_asap_hessian(sys, u0, psi0, options);
}

Vector adjoint_variation_rhs(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0,
                             const Vector& h_u, Index j) {
  check_row_index(sys, j);
  const Problem& problem = sys.problem();
  const Vector& a = sys.alpha();
  return problem.response.hess_uu(u0.values, a) * h_u + problem.response.hess_alpha_u(u0.values, a).col(j) -
         sys.dL(j).transpose() * psi0.values;
}

HessianMatrix so_fsap_hessian(NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0,
                              const HessianOptions& options) {
  const Index n = sys.parameter_count();
  const auto slots = static_cast<std::size_t>(n);

  // Forward sensitivities: reuse whatever an earlier FSAP pass left behind.
  if (sys.forward_sensitivities() == nullptr) {
    std::vector<Vector> h_u(slots);
    std::vector<SolveLedger> charged(slots);
    detail::for_each_index(sys.execution(), n, [&](Index j) {
      const auto slot = static_cast<std::size_t>(j);
      h_u[slot] = solve_forward(sys.factorization(), forward_sensitivity_rhs(sys, u0, j), SolveKind::sensitivity,
                                charged[slot]);
    });
    sys.ledger() += detail::merge(charged);
    sys.store_forward_sensitivities(std::move(h_u));
  }
  const std::vector<Vector>& h_u = *sys.forward_sensitivities();

  // The differentiated adjoint system decouples from the forward one, so each
  // h_psi^(j) is a single transpose solve.
  std::vector<Vector> h_psi(slots);
  {
    std::vector<SolveLedger> charged(slots);
    detail::for_each_index(sys.execution(), n, [&](Index j) {
      const auto slot = static_cast<std::size_t>(j);
      h_psi[slot] = solve_adjoint(sys.factorization(), adjoint_variation_rhs(sys, u0, psi0, h_u[slot], j),
                                  charged[slot]);
    });
    sys.ledger() += detail::merge(charged);
  }

  const SharedTerms t = shared_terms(sys, u0, psi0);
  Matrix h(n, n);
  detail::for_each_index(sys.execution(), n, [&](Index i) {
    const SassSources s = sources_from(sys, u0, psi0, t, i);
    const Vector direct = direct_effect_row(sys, u0, psi0, i);
    for (Index j = 0; j < n; ++j) {
      const auto slot = static_cast<std::size_t>(j);
      h(i, j) = direct[j] + s.grad_u.dot(h_u[slot]) + s.grad_psi.dot(h_psi[slot]);
    }
  });
  return finish(std::move(h), HessianMethod::so_fsap, options, sys.ledger());
}

HessianMatrix so_fsap_hessian(const Problem& problem, const HessianOptions& options, Execution exec) {
  NominalSystem sys(problem, exec);
  const StateVector u0 = evaluate_nominal(sys);
  const AdjointVector psi0 = adjoint_solve(sys, u0);
  return so_fsap_hessian(sys, u0, psi0, options);
}

}  // namespace sensas
