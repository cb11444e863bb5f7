#pragma once

#include "sensas/linsolve.hpp"
#include "sensas/model.hpp"
#include "sensas/types.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace sensas {

/// The operator factorized at alpha0, the first parameter derivatives of L and Q
/// evaluated there, and the ledger every procedure charges.
///
/// Read-only members may be used from several threads at once. Solves running
/// in parallel charge private ledgers that are merged into ledger() afterwards.
class NominalSystem {
 public:
  explicit NominalSystem(Problem problem, Execution exec = Execution::parallel);

  const Problem& problem() const { return problem_; }
  const Vector& alpha() const { return problem_.alpha0.values; }
  Index state_size() const { return problem_.state_size; }
  Index parameter_count() const { return problem_.parameter_count(); }
  Execution execution() const { return exec_; }

  const Factorization& factorization() const { return fact_; }
  SolveLedger& ledger() { return ledger_; }
  const SolveLedger& ledger() const { return ledger_; }

  /// dL/dalpha_k and dQ/dalpha_k at alpha0.
  const Matrix& dL(Index k) const { return dL_[static_cast<std::size_t>(k)]; }
  const Vector& dQ(Index k) const { return dQ_[static_cast<std::size_t>(k)]; }

  /// Forward sensitivities h_u^(k), one per parameter, once some procedure has solved for them.
  const std::vector<Vector>* forward_sensitivities() const {
    return forward_cache_ ? &*forward_cache_ : nullptr;
  }
  void store_forward_sensitivities(std::vector<Vector> h_u) { forward_cache_ = std::move(h_u); }

 private:
  Problem problem_;
  Execution exec_;
  SolveLedger ledger_;
  Factorization fact_;
  std::vector<Matrix> dL_;
  std::vector<Vector> dQ_;
  std::optional<std::vector<Vector>> forward_cache_;
};

/// u0 for the system's nominal parameters; one nominal solve.
StateVector evaluate_nominal(NominalSystem& sys);

enum class GradientMethod { fsap, asap, fd };
std::string_view to_string(GradientMethod method);

struct SensitivityGradient {
  Vector values;
  GradientMethod method = GradientMethod::asap;
  SolveLedger ledger;
  // Split of each component into dR/dalpha_k (direct) and the state-mediated
  // remainder (indirect). Empty for the finite-difference oracle.
  Vector direct_effect;
  Vector indirect_effect;
};

/// Column k of the forward-sensitivity right-hand side, dQ/dalpha_k - (dL/dalpha_k) u0.
Vector forward_sensitivity_rhs(const NominalSystem& sys, const StateVector& u0, Index k);

/// One forward sensitivity solve per parameter; caches the h_u^(k) on `sys`.
SensitivityGradient fsap_gradient(NominalSystem& sys, const StateVector& u0);

/// psi0 with L^T psi0 = D_u R(u0, alpha0); one adjoint solve.
AdjointVector adjoint_solve(NominalSystem& sys, const StateVector& u0);

/// All N sensitivities from psi0 with no further solves.
SensitivityGradient asap_gradient(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0);

/// S . h_alpha, the first-order response variation along a parameter direction.
double contract(const SensitivityGradient& gradient, const Vector& h_alpha);

}  // namespace sensas
