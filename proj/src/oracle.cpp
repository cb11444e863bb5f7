#include "sensas/oracle.hpp"

#include "parallel.hpp"
#include "sensas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sensas {

double FDConfig::step_for(double alpha) const { return std::max(rel_step * std::abs(alpha), abs_floor); }

void FDConfig::validate() const {
  if (!(rel_step > 0.0) || !std::isfinite(rel_step)) throw std::invalid_argument("FDConfig: rel_step must be positive");
  if (!(abs_floor > 0.0) || !std::isfinite(abs_floor)) {
    throw std::invalid_argument("FDConfig: abs_floor must be positive");
  }
}

double fd_response(const Problem& problem, const Vector& alpha, SolveLedger& ledger) {
  Factorization fact;
  try {
    fact = factorize(problem.op.eval(alpha), ledger, Execution::serial);
  } catch (const SingularMatrixError& e) {
    std::ostringstream where;
    where.precision(17);
    where << "operator at alpha = (";
    for (Index k = 0; k < alpha.size(); ++k) where << (k ? ", " : "") << alpha[k];
    where << ")";
    throw SingularMatrixError(e.pivot_index(), e.pivot_magnitude(), where.str());
  }
  const Vector u = solve_forward(fact, problem.source.eval(alpha), SolveKind::nominal, ledger);
  return problem.response.eval(u, alpha);
}

namespace {

// Evaluates R at every point, possibly concurrently, and charges `ledger`.
std::vector<double> evaluate_all(const Problem& problem, const std::vector<Vector>& points, Execution exec,
                                 SolveLedger& ledger) {
  const auto count = points.size();
  std::vector<double> values(count);
  std::vector<SolveLedger> charged(count);
  detail::for_each_index(exec, static_cast<Index>(count), [&](Index p) {
    const auto slot = static_cast<std::size_t>(p);
    values[slot] = fd_response(problem, points[slot], charged[slot]);
  });
  ledger += detail::merge(charged);
  return values;
}

Vector shifted(const Vector& base, Index i, double di) {
  Vector p = base;
  p[i] += di;
  return p;
}

Vector shifted(const Vector& base, Index i, double di, Index j, double dj) {
  Vector p = base;
  p[i] += di;
  p[j] += dj;
  return p;
}

}  // namespace

SensitivityGradient fd_gradient(const Problem& problem, const FDConfig& cfg, Execution exec) {
  cfg.validate();
  const Vector& a = problem.alpha0.values;
  const Index n = a.size();

  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(2 * n));
  for (Index k = 0; k < n; ++k) {
    const double h = cfg.step_for(a[k]);
    points.push_back(shifted(a, k, h));
    points.push_back(shifted(a, k, -h));
  }
  SensitivityGradient out;
  out.method = GradientMethod::fd;
  const std::vector<double> f = evaluate_all(problem, points, exec, out.ledger);

  out.values.resize(n);
  for (Index k = 0; k < n; ++k) {
    const auto p = static_cast<std::size_t>(2 * k);
    const double width = points[p][k] - points[p + 1][k];
    out.values[k] = (f[p] - f[p + 1]) / width;
  }
  return out;
}

HessianMatrix fd_hessian(const Problem& problem, const FDConfig& cfg, Execution exec) {
  cfg.validate();
  const Vector& a = problem.alpha0.values;
  const Index n = a.size();

  // Layout: [a0] [a0 + h_i e_i, a0 - h_i e_i]_i [++, +-, -+, --]_{i<j}
  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(1 + 2 * n + 2 * n * (n - 1)));
  std::vector<double> width(static_cast<std::size_t>(n));
  points.push_back(a);
  for (Index i = 0; i < n; ++i) {
    const double h = cfg.step_for(a[i]);
    points.push_back(shifted(a, i, h));
    points.push_back(shifted(a, i, -h));
    width[static_cast<std::size_t>(i)] = points[points.size() - 2][i] - points.back()[i];
  }
  for (Index i = 0; i < n; ++i) {
    const double hi = cfg.step_for(a[i]);
    for (Index j = i + 1; j < n; ++j) {
      const double hj = cfg.step_for(a[j]);
      points.push_back(shifted(a, i, hi, j, hj));
      points.push_back(shifted(a, i, hi, j, -hj));
      points.push_back(shifted(a, i, -hi, j, hj));
      points.push_back(shifted(a, i, -hi, j, -hj));
    }
  }

  HessianMatrix out;
  out.method = HessianMethod::fd;
  const std::vector<double> f = evaluate_all(problem, points, exec, out.ledger);

  Matrix h(n, n);
  const double f0 = f[0];
  for (Index i = 0; i < n; ++i) {
    const auto p = static_cast<std::size_t>(1 + 2 * i);
    const double half = 0.5 * width[static_cast<std::size_t>(i)];
    h(i, i) = (f[p] - 2.0 * f0 + f[p + 1]) / (half * half);
  }
  std::size_t p = static_cast<std::size_t>(1 + 2 * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j, p += 4) {
      const double denom = width[static_cast<std::size_t>(i)] * width[static_cast<std::size_t>(j)];
      h(i, j) = (f[p] - f[p + 1] - f[p + 2] + f[p + 3]) / denom;
      h(j, i) = h(i, j);
    }
  }
  out.values = std::move(h);
  out.asymmetry = 0.0;
  return out;
}

}  // namespace sensas
