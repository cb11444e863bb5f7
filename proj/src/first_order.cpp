#include "sensas/first_order.hpp"

#include "parallel.hpp"
#include "sensas/errors.hpp"

#include <string>

namespace sensas {

NominalSystem::NominalSystem(Problem problem, Execution exec) : problem_(std::move(problem)), exec_(exec) {
  problem_.validate();
  const Vector& a = problem_.alpha0.values;
  fact_ = factorize(problem_.op.eval(a), ledger_, exec_);
  const Index n = problem_.parameter_count();
  dL_.reserve(static_cast<std::size_t>(n));
  dQ_.reserve(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    dL_.push_back(problem_.op.d1(a, k));
    dQ_.push_back(problem_.source.d1(a, k));
  }
}

StateVector evaluate_nominal(NominalSystem& sys) {
  return evaluate_nominal(sys.factorization(), sys.problem(), sys.ledger());
}

std::string_view to_string(GradientMethod method) {
  switch (method) {
    case GradientMethod::fsap: return "FSAP";
    case GradientMethod::asap: return "ASAP";
    case GradientMethod::fd: return "FD";
  }
  return "?";
}

Vector forward_sensitivity_rhs(const NominalSystem& sys, const StateVector& u0, Index k) {
  if (k < 0 || k >= sys.parameter_count()) {
    throw IndexError("parameter index " + std::to_string(k) + " out of range [0, " +
                     std::to_string(sys.parameter_count()) + ")");
  }
  return sys.dQ(k) - sys.dL(k) * u0.values;
}

SensitivityGradient fsap_gradient(NominalSystem& sys, const StateVector& u0) {
  const Index n = sys.parameter_count();
  std::vector<Vector> h_u(static_cast<std::size_t>(n));
  std::vector<SolveLedger> charged(static_cast<std::size_t>(n));
  detail::for_each_index(sys.execution(), n, [&](Index k) {
    const auto slot = static_cast<std::size_t>(k);
    h_u[slot] = solve_forward(sys.factorization(), forward_sensitivity_rhs(sys, u0, k), SolveKind::sensitivity,
                              charged[slot]);
  });
  sys.ledger() += detail::merge(charged);

  const Vector& a = sys.alpha();
  const Vector grad_u = sys.problem().response.grad_u(u0.values, a);

  SensitivityGradient out;
  out.method = GradientMethod::fsap;
  out.direct_effect = sys.problem().response.grad_alpha(u0.values, a);
  out.indirect_effect.resize(n);
  for (Index k = 0; k < n; ++k) out.indirect_effect[k] = grad_u.dot(h_u[static_cast<std::size_t>(k)]);
  out.values = out.direct_effect + out.indirect_effect;
  sys.store_forward_sensitivities(std::move(h_u));
  out.ledger = sys.ledger();
  return out;
}

AdjointVector adjoint_solve(NominalSystem& sys, const StateVector& u0) {
  const Vector rhs = sys.problem().response.grad_u(u0.values, sys.alpha());
  return AdjointVector{solve_adjoint(sys.factorization(), rhs, sys.ledger())};
}

SensitivityGradient asap_gradient(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0) {
  const Index n = sys.parameter_count();
  const Problem& problem = sys.problem();
  const Vector& a = sys.alpha();
  const Vector concomitant = problem.concomitant.eval_dP_dalpha(u0.values, psi0.values, a);

  SensitivityGradient out;
  out.method = GradientMethod::asap;
  out.direct_effect = problem.response.grad_alpha(u0.values, a);
  out.indirect_effect.resize(n);
  for (Index k = 0; k < n; ++k) {
    out.indirect_effect[k] = psi0.values.dot(forward_sensitivity_rhs(sys, u0, k)) - concomitant[k];
  }
  out.values = out.direct_effect + out.indirect_effect;
  out.ledger = sys.ledger();
  return out;
}

double contract(const SensitivityGradient& gradient, const Vector& h_alpha) {
  if (h_alpha.size() != gradient.values.size()) {
    throw ShapeError("h_alpha", "length does not match the gradient");
  }
  return gradient.values.dot(h_alpha);
}

}  // namespace sensas
