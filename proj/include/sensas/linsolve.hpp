#pragma once

#include "sensas/types.hpp"

#include <cstdint>
#include <vector>

namespace sensas {

/// Counts of linear-system work. One right-hand-side solve is one
/// "large-scale computation"; factorizations are tracked separately.
struct SolveLedger {
  std::int64_t nominal_solves = 0;
  std::int64_t forward_sensitivity_solves = 0;
  std::int64_t adjoint_solves = 0;
  std::int64_t factorizations = 0;

  std::int64_t sensitivity_total() const { return forward_sensitivity_solves + adjoint_solves; }

  SolveLedger& operator+=(const SolveLedger& other);
  friend SolveLedger operator+(SolveLedger a, const SolveLedger& b) { return a += b; }
  friend bool operator==(const SolveLedger&, const SolveLedger&) = default;
};

enum class SolveKind { nominal, sensitivity };

/// Pivots smaller than this times the largest |a_ij| are treated as singular.
inline constexpr double kSingularPivotTolerance = 1e-12;

/// Row-pivoted LU factors of a square matrix, P A = L U with unit-diagonal L
/// stored below the diagonal of `lu`. Immutable once built, so a single
/// instance may be shared by concurrent solves.
class Factorization {
 public:
  Factorization() = default;
  Factorization(Matrix lu, std::vector<Index> row_of_step);

  Index size() const { return lu_.rows(); }
  const Matrix& packed() const { return lu_; }
  /// row_of_step()[k] is the original row placed at position k.
  const std::vector<Index>& row_of_step() const { return perm_; }

  /// Solves A x = b without touching any ledger.
  Vector apply_inverse(const Vector& b) const;
  /// Solves A^T x = b without touching any ledger.
  Vector apply_inverse_transpose(const Vector& b) const;

 private:
  Matrix lu_;
  std::vector<Index> perm_;
};

namespace kernels {

// In-place partial-pivoting LU. On return `a` holds the packed factors and
// `perm` the row order. Throws SingularMatrixError.
void lu_factor_serial(Matrix& a, std::vector<Index>& perm, double tolerance);
// Same arithmetic as the serial kernel with the trailing update split across
// columns, so the factors agree bit for bit.
void lu_factor_parallel(Matrix& a, std::vector<Index>& perm, double tolerance);

}  // namespace kernels

/// Factorizes a square, finite matrix. Increments `ledger.factorizations`.
Factorization factorize(const Matrix& matrix, SolveLedger& ledger,
                        Execution exec = Execution::parallel);

/// x with A x = rhs; charges nominal_solves or forward_sensitivity_solves.
Vector solve_forward(const Factorization& fact, const Vector& rhs, SolveKind kind, SolveLedger& ledger);

/// x with A^T x = rhs; charges adjoint_solves.
Vector solve_adjoint(const Factorization& fact, const Vector& rhs, SolveLedger& ledger);

}  // namespace sensas
