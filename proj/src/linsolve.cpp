#include "sensas/linsolve.hpp"

#include "sensas/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace sensas {

SolveLedger& SolveLedger::operator+=(const SolveLedger& other) {
  nominal_solves += other.nominal_solves;
  forward_sensitivity_solves += other.forward_sensitivity_solves;
  adjoint_solves += other.adjoint_solves;
  factorizations += other.factorizations;
  return *this;
}

Factorization::Factorization(Matrix lu, std::vector<Index> row_of_step)
    : lu_(std::move(lu)), perm_(std::move(row_of_step)) {}

Vector Factorization::apply_inverse(const Vector& b) const {
  const Index n = size();
  if (b.size() != n) {
    throw ShapeError("rhs", "length " + std::to_string(b.size()) + ", expected " + std::to_string(n));
  }
  Vector y(n);
  for (Index k = 0; k < n; ++k) y[k] = b[perm_[static_cast<std::size_t>(k)]];
  lu_.triangularView<Eigen::UnitLower>().solveInPlace(y);
  lu_.triangularView<Eigen::Upper>().solveInPlace(y);
  return y;
}

Vector Factorization::apply_inverse_transpose(const Vector& b) const {
  const Index n = size();
  if (b.size() != n) {
    throw ShapeError("rhs", "length " + std::to_string(b.size()) + ", expected " + std::to_string(n));
  }
  // A = P^T L U, so A^T x = b is U^T L^T (P x) = b.
  Vector z = b;
  lu_.triangularView<Eigen::Upper>().transpose().solveInPlace(z);
  lu_.triangularView<Eigen::UnitLower>().transpose().solveInPlace(z);
  Vector x(n);
  for (Index k = 0; k < n; ++k) x[perm_[static_cast<std::size_t>(k)]] = z[k];
  return x;
}

namespace kernels {
namespace {

double max_abs_entry(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// Pivot search, row swap and column scaling for elimination step k. Shared by
// both kernels so they pick identical pivots.
void pivot_and_scale(Matrix& a, std::vector<Index>& perm, Index k, double threshold) {
  const Index n = a.rows();
  Index p = k;
  double best = std::abs(a(k, k));
  for (Index i = k + 1; i < n; ++i) {
    const double v = std::abs(a(i, k));
    if (v > best) {
      best = v;
      p = i;
    }
  }
  if (best < threshold || best == 0.0) throw SingularMatrixError(k, best);
  if (p != k) {
    a.row(k).swap(a.row(p));
    std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(p)]);
  }
  const double pivot = a(k, k);
  for (Index i = k + 1; i < n; ++i) a(i, k) /= pivot;
}

void init_perm(std::vector<Index>& perm, Index n) {
  perm.resize(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
}

}  // namespace

void lu_factor_serial(Matrix& a, std::vector<Index>& perm, double tolerance) {
  const Index n = a.rows();
  init_perm(perm, n);
  const double threshold = tolerance * max_abs_entry(a);
  for (Index k = 0; k < n; ++k) {
    pivot_and_scale(a, perm, k, threshold);
    for (Index j = k + 1; j < n; ++j) {
      const double akj = a(k, j);
      for (Index i = k + 1; i < n; ++i) a(i, j) -= a(i, k) * akj;
    }
  }
}

void lu_factor_parallel(Matrix& a, std::vector<Index>& perm, double tolerance) {
  const Index n = a.rows();
  init_perm(perm, n);
  const double threshold = tolerance * max_abs_entry(a);
  constexpr Index kMinParallelWidth = 64;
  for (Index k = 0; k < n; ++k) {
    pivot_and_scale(a, perm, k, threshold);
    const Index width = n - k - 1;
#pragma omp parallel for schedule(static) if (width >= kMinParallelWidth)
    for (Index j = k + 1; j < n; ++j) {
      const double akj = a(k, j);
      for (Index i = k + 1; i < n; ++i) a(i, j) -= a(i, k) * akj;
    }
  }
}

}  // namespace kernels

Factorization factorize(const Matrix& matrix, SolveLedger& ledger, Execution exec) {
  if (matrix.rows() != matrix.cols()) {
    throw ShapeError("matrix", "not square (" + std::to_string(matrix.rows()) + "x" +
                                   std::to_string(matrix.cols()) + ")");
  }
  if (matrix.rows() == 0) throw ShapeError("matrix", "empty");
  if (!matrix.allFinite()) throw ShapeError("matrix", "non-finite entry");

  Matrix lu = matrix;
  std::vector<Index> perm;
  if (exec == Execution::parallel) {
    kernels::lu_factor_parallel(lu, perm, kSingularPivotTolerance);
  } else {
    kernels::lu_factor_serial(lu, perm, kSingularPivotTolerance);
  }
  ++ledger.factorizations;
  return Factorization(std::move(lu), std::move(perm));
}

Vector solve_forward(const Factorization& fact, const Vector& rhs, SolveKind kind, SolveLedger& ledger) {
  Vector x = fact.apply_inverse(rhs);
  if (kind == SolveKind::nominal) {
    ++ledger.nominal_solves;
  } else {
    ++ledger.forward_sensitivity_solves;
  }
  return x;
}

Vector solve_adjoint(const Factorization& fact, const Vector& rhs, SolveLedger& ledger) {
  Vector x = fact.apply_inverse_transpose(rhs);
  ++ledger.adjoint_solves;
  return x;
}

}  // namespace sensas
