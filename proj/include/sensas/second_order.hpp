#pragma once

#include "sensas/first_order.hpp"

#include <cstdint>
#include <string_view>

namespace sensas {

/// Right-hand sides of the second adjoint system for Hessian row i.
struct SassSources {
  Vector grad_u;    // D_u S_i
  Vector grad_psi;  // D_psi S_i
};

/// Second-level adjoints for one Hessian row.
struct SassPair {
  AdjointVector psi1;
  AdjointVector psi2;
  Index row_index = 0;
};

enum class HessianMethod { so_fsap, so_asap, fd };
std::string_view to_string(HessianMethod method);

struct HessianMatrix {
  Matrix values;
  HessianMethod method = HessianMethod::so_asap;
  /// max |H_ij - H_ji| over i < j of the raw, unsymmetrized matrix.
  double asymmetry = 0.0;
  bool symmetrized = false;
  SolveLedger ledger;
};

struct HessianOptions {
  /// Return (H + H^T) / 2 instead of the raw rows. asymmetry still describes the raw rows.
  bool symmetrize = false;
};

double max_asymmetry(const Matrix& h);

/// Solve counts quoted for the two second-order procedures.
constexpr std::int64_t so_asap_nominal_count(std::int64_t n) { return 2 * n + 1; }
constexpr std::int64_t so_fsap_nominal_count(std::int64_t n) { return n * (n + 3) / 2; }

SassSources sass_sources(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0, Index i);

/// L psi2 = grad_psi, then L^T psi1 = grad_u + hess_uu^T psi2. Exactly two solves.
SassPair sass_solve(const NominalSystem& sys, const StateVector& u0, const SassSources& sources, Index i,
                    SolveLedger& ledger);

/// Explicit-dependence part of Hessian row i; no solves.
Vector direct_effect_row(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0, Index i);

/// State- and adjoint-mediated part of Hessian row i from its SASS pair; no solves.
Vector indirect_effect_row(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0,
                           const SassPair& pair);

/// Full Hessian by second-level adjoints, 2N solves on top of psi0.
HessianMatrix so_asap_hessian(NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0,
                              const HessianOptions& options = {});
/// Runs the nominal and first adjoint solves itself: 1 nominal + (2N + 1) sensitivity solves.
HessianMatrix so_asap_hessian(const Problem& problem, const HessianOptions& options = {},
                              Execution exec = Execution::parallel);

/// Right-hand side of the differentiated adjoint system for direction j:
/// hess_uu h_u^(j) + column_j(hess_alpha_u) - (dL/dalpha_j)^T psi0.
Vector adjoint_variation_rhs(const NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0,
                             const Vector& h_u, Index j);

/// Full Hessian from the forward sensitivities h_u^(j) (reused from the cache
/// when present) and the adjoint variations h_psi^(j).
HessianMatrix so_fsap_hessian(NominalSystem& sys, const StateVector& u0, const AdjointVector& psi0,
                              const HessianOptions& options = {});
HessianMatrix so_fsap_hessian(const Problem& problem, const HessianOptions& options = {},
                              Execution exec = Execution::parallel);

}  // namespace sensas
