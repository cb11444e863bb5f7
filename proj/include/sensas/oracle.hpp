#pragma once

#include "sensas/first_order.hpp"
#include "sensas/model.hpp"
#include "sensas/second_order.hpp"

namespace sensas {

/// Central-difference step policy: h_k = max(rel_step * |alpha_k|, abs_floor).
struct FDConfig {
  double rel_step = 1e-5;
  double abs_floor = 1e-7;

  double step_for(double alpha) const;
  void validate() const;
};

/// Default for second differences. Their rounding error scales like eps/h^2
/// rather than eps/h, which moves the balance point to about eps^(1/4); at
/// 1e-5 the Hessian of a moderately conditioned operator is dominated by the
/// rounding of L(alpha) itself.
inline constexpr FDConfig kHessianFDConfig{1e-4, 1e-7};

/// R(u(alpha), alpha) by a fresh factorization and one nominal solve at alpha.
/// Uses only the eval callbacks. A singular L(alpha) raises SingularMatrixError
/// whose message lists alpha.
double fd_response(const Problem& problem, const Vector& alpha, SolveLedger& ledger);

/// Central differences, 2N response evaluations.
SensitivityGradient fd_gradient(const Problem& problem, const FDConfig& cfg = {},
                                Execution exec = Execution::parallel);

/// Three-point diagonal and four-point mixed stencils, 1 + 2N + 2N(N-1)
/// response evaluations. Each unordered pair is computed once and mirrored.
HessianMatrix fd_hessian(const Problem& problem, const FDConfig& cfg = kHessianFDConfig,
                         Execution exec = Execution::parallel);

}  // namespace sensas
