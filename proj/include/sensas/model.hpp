#pragma once

#include "sensas/linsolve.hpp"
#include "sensas/types.hpp"

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sensas {

// All parameter and state indices in the C++ API are 0-based. File formats
// and reports use 1-based indices.

/// L(alpha) and its first and second parameter derivatives, as dense K x K matrices.
struct OperatorFamily {
  std::function<Matrix(const Vector& alpha)> eval;
  std::function<Matrix(const Vector& alpha, Index k)> d1;
  std::function<Matrix(const Vector& alpha, Index j, Index k)> d2;
};

/// Q(alpha) and its parameter derivatives.
struct SourceFamily {
  std::function<Vector(const Vector& alpha)> eval;
  std::function<Vector(const Vector& alpha, Index k)> d1;
  std::function<Vector(const Vector& alpha, Index j, Index k)> d2;
};

/// Scalar response R(u, alpha) with every derivative block the sensitivity
/// procedures consume.
struct ResponseFunctional {
  std::function<double(const Vector& u, const Vector& alpha)> eval;
  std::function<Vector(const Vector& u, const Vector& alpha)> grad_u;            // K
  std::function<Vector(const Vector& u, const Vector& alpha)> grad_alpha;        // N
  std::function<Matrix(const Vector& u, const Vector& alpha)> hess_uu;           // K x K
  std::function<Matrix(const Vector& u, const Vector& alpha)> hess_alpha_u;      // K x N, (m, k) = d2R/du_m dalpha_k
  std::function<Matrix(const Vector& u, const Vector& alpha)> hess_alpha_alpha;  // N x N
};

/// Boundary-concomitant contributions. In the discrete setting they vanish,
/// so every unset hook evaluates to a zero vector of the right length.
struct ConcomitantHooks {
  // dP/dalpha at (u, psi, alpha), length N.
  std::function<Vector(const Vector& u, const Vector& psi, const Vector& alpha)> dP_dalpha;
  // d/dalpha_i of dP/dalpha, length N (enters the direct-effect row).
  std::function<Vector(const Vector& u, const Vector& psi, const Vector& alpha, Index i)> d2P_dalpha_row;
  // D_u of dP/dalpha_i, length K.
  std::function<Vector(const Vector& u, const Vector& psi, const Vector& alpha, Index i)> grad_u_of_dP;
  // D_psi of dP/dalpha_i, length K.
  std::function<Vector(const Vector& u, const Vector& psi, const Vector& alpha, Index i)> grad_psi_of_dP;
  // Reduced second-level concomitant for row i, length N.
  std::function<Vector(const Vector& u, const Vector& alpha, const Vector& psi1, const Vector& psi2, Index i)>
      p2_row;

  Vector eval_dP_dalpha(const Vector& u, const Vector& psi, const Vector& alpha) const;
  Vector eval_d2P_dalpha_row(const Vector& u, const Vector& psi, const Vector& alpha, Index i) const;
  Vector eval_grad_u_of_dP(const Vector& u, const Vector& psi, const Vector& alpha, Index i) const;
  Vector eval_grad_psi_of_dP(const Vector& u, const Vector& psi, const Vector& alpha, Index i) const;
  Vector eval_p2_row(const Vector& u, const Vector& alpha, const Vector& psi1, const Vector& psi2,
                     Index i) const;
};

/// A parameterized linear system L(alpha) u = Q(alpha) with response R(u, alpha),
/// taken at the nominal parameters alpha0. Callbacks must be pure; a Problem
/// may be shared read-only between threads.
struct Problem {
  Index state_size = 0;  // K_u
  OperatorFamily op;
  SourceFamily source;
  ResponseFunctional response;
  ConcomitantHooks concomitant;
  ParameterVector alpha0;

  Index parameter_count() const { return alpha0.size(); }

  /// Evaluates every callback once at alpha0 and a trial state and checks
  /// shapes. Throws ShapeError naming the first inconsistent member.
  void validate() const;

  /// Same problem at different nominal parameters.
  Problem at(const Vector& alpha) const;
};

/// Upper-triangle store for families indexed by an unordered parameter pair.
/// Absent entries are zero.
template <typename Block>
class SymmetricFamily {
 public:
  void set(Index j, Index k, Block block) { blocks_[key(j, k)] = std::move(block); }
  const Block* find(Index j, Index k) const {
    auto it = blocks_.find(key(j, k));
    return it == blocks_.end() ? nullptr : &it->second;
  }
  bool contains(Index j, Index k) const { return find(j, k) != nullptr; }
  bool empty() const { return blocks_.empty(); }
  /// Entries keyed (j, k) with j <= k.
  const std::map<std::pair<Index, Index>, Block>& entries() const { return blocks_; }

 private:
  static std::pair<Index, Index> key(Index j, Index k) { return j <= k ? std::pair{j, k} : std::pair{k, j}; }
  std::map<std::pair<Index, Index>, Block> blocks_;
};

/// Affine-quadratic problem data:
///   L(a) = L0 + sum_k a_k L[k] + 1/2 sum_{j,k} a_j a_k L2(j,k)
///   Q(a) = q0 + sum_k a_k q[k] + 1/2 sum_{j,k} a_j a_k q2(j,k)
///   R(u,a) = c.u + 1/2 u.M u + u.N a + d.a + 1/2 a.G a
struct AffineQuadraticProblem {
  Matrix L0;
  std::vector<Matrix> L;
  SymmetricFamily<Matrix> L2;
  Vector q0;
  std::vector<Vector> q;
  SymmetricFamily<Vector> q2;
  Vector c;
  Matrix M;
  Matrix N;
  Vector d;
  Matrix G;

  /// All-zero data of the given dimensions.
  static AffineQuadraticProblem zeros(Index state_size, Index parameter_count);

  Index state_size() const { return L0.rows(); }
  Index parameter_count() const { return d.size(); }

  /// Throws ShapeError naming the offending field.
  void validate() const;
};

/// Wraps the data in closed-form callbacks. Validates shapes and symmetry of M and G
/// (1e-12 relative).
Problem build_affine_quadratic_problem(AffineQuadraticProblem data, ParameterVector alpha0);

/// Solves L(alpha0) u0 = Q(alpha0). Charges one nominal solve.
StateVector evaluate_nominal(const Factorization& fact, const Problem& problem, SolveLedger& ledger);
/// Convenience overload that factorizes on its own (one factorization, one nominal solve).
StateVector evaluate_nominal(const Problem& problem, SolveLedger& ledger);

/// Maximum relative discrepancy between a callback and central differences of
/// the quantity it claims to differentiate.
struct BlockDiscrepancy {
  std::string block;
  double max_relative = 0.0;
};

struct ConsistencyReport {
  std::vector<BlockDiscrepancy> blocks;

  double worst() const;
  /// Nullptr when every block is within tolerance.
  const BlockDiscrepancy* first_exceeding(double tolerance) const;
};

/// Probes op.eval against op.d1, op.d1 against op.d2, source likewise, and
/// response.eval against all gradient and Hessian blocks, at alpha0 and at a
/// perturbed point. Never throws on a discrepancy; it is reported.
ConsistencyReport check_derivative_callbacks(const Problem& problem, double step);

}  // namespace sensas
