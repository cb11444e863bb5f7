#pragma once

#include "sensas/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

namespace sensas::testing {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

inline Matrix random_matrix(std::mt19937& rng, Index rows, Index cols, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

inline Vector random_vector(std::mt19937& rng, Index n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale).col(0);
}

inline Matrix random_symmetric(std::mt19937& rng, Index n, double scale = 1.0) {
  const Matrix a = random_matrix(rng, n, n, scale);
  return 0.5 * (a + a.transpose());
}

struct RandomShape {
  Index state_size = 4;
  Index parameters = 3;
  bool quadratic_operator = true;  // populate some L2 / q2 blocks
  bool quadratic_response = true;  // nonzero M, N, G
};

// Well-conditioned, nonsymmetric affine-quadratic data: L0 is strongly
// diagonally dominant and the parameter blocks are small, so L(alpha0) stays
// comfortably invertible for alpha0 in [0.5, 1.5].
inline AffineQuadraticProblem random_affine_data(std::mt19937& rng, const RandomShape& s) {
  const Index k = s.state_size;
  const Index n = s.parameters;
  AffineQuadraticProblem d = AffineQuadraticProblem::zeros(k, n);
  d.L0 = random_matrix(rng, k, k, 0.5);
  d.L0.diagonal().array() += 2.0 + static_cast<double>(k);
  for (auto& l : d.L) l = random_matrix(rng, k, k, 0.3);
  d.q0 = random_vector(rng, k);
  for (auto& q : d.q) q = random_vector(rng, k);
  if (s.quadratic_operator) {
    std::bernoulli_distribution pick(0.5);
    for (Index j = 0; j < n; ++j) {
      for (Index i = j; i < n; ++i) {
        if (pick(rng)) d.L2.set(j, i, random_matrix(rng, k, k, 0.1));
        if (pick(rng)) d.q2.set(j, i, random_vector(rng, k, 0.5));
      }
    }
  }
  d.c = random_vector(rng, k);
  d.d = random_vector(rng, n);
  if (s.quadratic_response) {
    d.M = random_symmetric(rng, k);
    d.N = random_matrix(rng, k, n);
    d.G = random_symmetric(rng, n);
  }
  return d;
}

inline ParameterVector random_alpha(std::mt19937& rng, Index n) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  ParameterVector p;
  p.values.resize(n);
  for (Index i = 0; i < n; ++i) p.values[i] = u(rng);
  return p;
}

inline Problem random_problem(std::mt19937& rng, const RandomShape& s) {
  return build_affine_quadratic_problem(random_affine_data(rng, s), random_alpha(rng, s.parameters));
}

}  // namespace sensas::testing
