#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace sensas {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Model parameters alpha; names are optional and, when present, one per value.
struct ParameterVector {
  Vector values;
  std::vector<std::string> names;

  Index size() const { return values.size(); }
  /// Name of parameter k (0-based), falling back to "alpha<k+1>".
  std::string name(Index k) const;
};

/// Forward state u.
struct StateVector {
  Vector values;
};

/// Adjoint function psi (first- or second-level).
struct AdjointVector {
  Vector values;
};

// Selects between the OpenMP kernels and the serial reference path. Both
// produce bit-identical results; only the scheduling differs.
enum class Execution { serial, parallel };

}  // namespace sensas
