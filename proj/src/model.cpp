#include "sensas/model.hpp"

#include "sensas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>

namespace sensas {

std::string ParameterVector::name(Index k) const {
  if (k >= 0 && static_cast<std::size_t>(k) < names.size() && !names[static_cast<std::size_t>(k)].empty()) {
    return names[static_cast<std::size_t>(k)];
  }
  return "alpha" + std::to_string(k + 1);
}

// ---------------------------------------------------------------------------
// Concomitant hooks

Vector ConcomitantHooks::eval_dP_dalpha(const Vector& u, const Vector& psi, const Vector& alpha) const {
  return dP_dalpha ? dP_dalpha(u, psi, alpha) : Vector::Zero(alpha.size());
}

Vector ConcomitantHooks::eval_d2P_dalpha_row(const Vector& u, const Vector& psi, const Vector& alpha,
                                             Index i) const {
  return d2P_dalpha_row ? d2P_dalpha_row(u, psi, alpha, i) : Vector::Zero(alpha.size());
}

Vector ConcomitantHooks::eval_grad_u_of_dP(const Vector& u, const Vector& psi, const Vector& alpha,
                                           Index i) const {
  return grad_u_of_dP ? grad_u_of_dP(u, psi, alpha, i) : Vector::Zero(u.size());
}

Vector ConcomitantHooks::eval_grad_psi_of_dP(const Vector& u, const Vector& psi, const Vector& alpha,
                                             Index i) const {
  return grad_psi_of_dP ? grad_psi_of_dP(u, psi, alpha, i) : Vector::Zero(u.size());
}

Vector ConcomitantHooks::eval_p2_row(const Vector& u, const Vector& alpha, const Vector& psi1,
                                     const Vector& psi2, Index i) const {
  return p2_row ? p2_row(u, alpha, psi1, psi2, i) : Vector::Zero(alpha.size());
}

// ---------------------------------------------------------------------------
// Problem

namespace {

std::string dims(Index rows, Index cols) { return std::to_string(rows) + "x" + std::to_string(cols); }

void expect_matrix(const std::string& field, const Matrix& m, Index rows, Index cols) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(field, "is " + dims(m.rows(), m.cols()) + ", expected " + dims(rows, cols));
  }
  if (!m.allFinite()) throw ShapeError(field, "has a non-finite entry");
}

void expect_vector(const std::string& field, const Vector& v, Index size) {
  if (v.size() != size) {
    throw ShapeError(field, "has length " + std::to_string(v.size()) + ", expected " + std::to_string(size));
  }
  if (!v.allFinite()) throw ShapeError(field, "has a non-finite entry");
}

void expect_symmetric(const std::string& field, const Matrix& m) {
  const double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  const double asym = m.size() == 0 ? 0.0 : (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw ShapeError(field, "is not symmetric (max |a_ij - a_ji| = " + std::to_string(asym) + ")");
  }
}

std::string pair_name(const std::string& base, Index j, Index k) {
  return base + " " + std::to_string(j + 1) + " " + std::to_string(k + 1);
}

}  // namespace

void Problem::validate() const {
  const Index n = parameter_count();
  const Index k_u = state_size;
  if (k_u < 1) throw ShapeError("state_size", "must be at least 1");
  if (n < 1) throw ShapeError("alpha0", "must hold at least one parameter");
  if (!alpha0.values.allFinite()) throw ShapeError("alpha0", "has a non-finite entry");
  if (!alpha0.names.empty() && static_cast<Index>(alpha0.names.size()) != n) {
    throw ShapeError("alpha0.names", "needs one name per parameter");
  }
  if (!op.eval || !op.d1 || !op.d2) throw ShapeError("operator", "missing callback");
  if (!source.eval || !source.d1 || !source.d2) throw ShapeError("source", "missing callback");
  if (!response.eval || !response.grad_u || !response.grad_alpha || !response.hess_uu ||
      !response.hess_alpha_u || !response.hess_alpha_alpha) {
    throw ShapeError("response", "missing callback");
  }

  const Vector& a = alpha0.values;
  expect_matrix("operator.eval", op.eval(a), k_u, k_u);
  expect_vector("source.eval", source.eval(a), k_u);
  for (Index k = 0; k < n; ++k) {
    expect_matrix("operator.d1", op.d1(a, k), k_u, k_u);
    expect_vector("source.d1", source.d1(a, k), k_u);
  }
  expect_matrix("operator.d2", op.d2(a, 0, 0), k_u, k_u);
  expect_vector("source.d2", source.d2(a, 0, 0), k_u);

  const Vector u = Vector::Ones(k_u);
  if (!std::isfinite(response.eval(u, a))) throw ShapeError("response.eval", "non-finite value");
  expect_vector("response.grad_u", response.grad_u(u, a), k_u);
  expect_vector("response.grad_alpha", response.grad_alpha(u, a), n);
  expect_matrix("response.hess_uu", response.hess_uu(u, a), k_u, k_u);
  expect_matrix("response.hess_alpha_u", response.hess_alpha_u(u, a), k_u, n);
  expect_matrix("response.hess_alpha_alpha", response.hess_alpha_alpha(u, a), n, n);
  expect_vector("concomitant.dP_dalpha", concomitant.eval_dP_dalpha(u, u, a), n);
}

Problem Problem::at(const Vector& alpha) const {
  if (alpha.size() != parameter_count()) {
    throw ShapeError("alpha", "has length " + std::to_string(alpha.size()) + ", expected " +
                                  std::to_string(parameter_count()));
  }
  Problem moved = *this;
  moved.alpha0.values = alpha;
  return moved;
}

// ---------------------------------------------------------------------------
// Affine-quadratic problems

AffineQuadraticProblem AffineQuadraticProblem::zeros(Index state_size, Index parameter_count) {
  AffineQuadraticProblem p;
  p.L0 = Matrix::Zero(state_size, state_size);
  p.L.assign(static_cast<std::size_t>(parameter_count), Matrix::Zero(state_size, state_size));
  p.q0 = Vector::Zero(state_size);
  p.q.assign(static_cast<std::size_t>(parameter_count), Vector::Zero(state_size));
  p.c = Vector::Zero(state_size);
  p.M = Matrix::Zero(state_size, state_size);
  p.N = Matrix::Zero(state_size, parameter_count);
  p.d = Vector::Zero(parameter_count);
  p.G = Matrix::Zero(parameter_count, parameter_count);
  return p;
}

void AffineQuadraticProblem::validate() const {
  const Index k_u = L0.rows();
  const Index n = d.size();
  if (k_u < 1) throw ShapeError("L0", "must be at least 1x1");
  if (n < 1) throw ShapeError("d", "must have at least one parameter");
  expect_matrix("L0", L0, k_u, k_u);
  if (static_cast<Index>(L.size()) != n) {
    throw ShapeError("L", "has " + std::to_string(L.size()) + " blocks, expected " + std::to_string(n));
  }
  for (Index k = 0; k < n; ++k) {
    expect_matrix("L " + std::to_string(k + 1), L[static_cast<std::size_t>(k)], k_u, k_u);
  }
  for (const auto& [key, block] : L2.entries()) {
    if (key.second >= n || key.first < 0) throw ShapeError(pair_name("L2", key.first, key.second), "index out of range");
    expect_matrix(pair_name("L2", key.first, key.second), block, k_u, k_u);
  }
  expect_vector("q0", q0, k_u);
  if (static_cast<Index>(q.size()) != n) {
    throw ShapeError("q", "has " + std::to_string(q.size()) + " blocks, expected " + std::to_string(n));
  }
  for (Index k = 0; k < n; ++k) expect_vector("q " + std::to_string(k + 1), q[static_cast<std::size_t>(k)], k_u);
  for (const auto& [key, block] : q2.entries()) {
    if (key.second >= n || key.first < 0) throw ShapeError(pair_name("q2", key.first, key.second), "index out of range");
    expect_vector(pair_name("q2", key.first, key.second), block, k_u);
  }
  expect_vector("c", c, k_u);
  expect_matrix("M", M, k_u, k_u);
  expect_symmetric("M", M);
  expect_matrix("N", N, k_u, n);
  expect_matrix("G", G, n, n);
  expect_symmetric("G", G);
}

Problem build_affine_quadratic_problem(AffineQuadraticProblem data, ParameterVector alpha0) {
  data.validate();
  const Index k_u = data.state_size();
  const Index n = data.parameter_count();
  if (alpha0.size() != n) {
    throw ShapeError("alpha0", "has length " + std::to_string(alpha0.size()) + ", expected " + std::to_string(n));
  }
  auto p = std::make_shared<const AffineQuadraticProblem>(std::move(data));

  Problem problem;
  problem.state_size = k_u;
  problem.alpha0 = std::move(alpha0);

  problem.op.eval = [p](const Vector& a) {
    Matrix out = p->L0;
    for (std::size_t k = 0; k < p->L.size(); ++k) out += a[static_cast<Index>(k)] * p->L[k];
    for (const auto& [key, block] : p->L2.entries()) {
      const auto [j, k] = key;
      // Off-diagonal pairs appear twice in the symmetric double sum.
      const double w = j == k ? 0.5 * a[j] * a[j] : a[j] * a[k];
      out += w * block;
    }
    return out;
  };
  problem.op.d1 = [p](const Vector& a, Index k) {
    Matrix out = p->L[static_cast<std::size_t>(k)];
    for (const auto& [key, block] : p->L2.entries()) {
      if (key.first == k) out += a[key.second] * block;
      if (key.second == k) out += a[key.first] * block;
      // (k, k) is added twice above, matching d/da_k of (1/2) a_k^2.
      if (key.first == k && key.second == k) out -= a[k] * block;
    }
    return out;
  };
  problem.op.d2 = [p, k_u](const Vector&, Index j, Index k) -> Matrix {
    if (const Matrix* block = p->L2.find(j, k)) return *block;
    return Matrix::Zero(k_u, k_u);
  };

  problem.source.eval = [p](const Vector& a) {
    Vector out = p->q0;
    for (std::size_t k = 0; k < p->q.size(); ++k) out += a[static_cast<Index>(k)] * p->q[k];
    for (const auto& [key, block] : p->q2.entries()) {
      const auto [j, k] = key;
      const double w = j == k ? 0.5 * a[j] * a[j] : a[j] * a[k];
      out += w * block;
    }
    return out;
  };
  problem.source.d1 = [p](const Vector& a, Index k) {
    Vector out = p->q[static_cast<std::size_t>(k)];
    for (const auto& [key, block] : p->q2.entries()) {
      if (key.first == k) out += a[key.second] * block;
      if (key.second == k) out += a[key.first] * block;
      if (key.first == k && key.second == k) out -= a[k] * block;
    }
    return out;
  };
  problem.source.d2 = [p, k_u](const Vector&, Index j, Index k) -> Vector {
    if (const Vector* block = p->q2.find(j, k)) return *block;
    return Vector::Zero(k_u);
  };

  problem.response.eval = [p](const Vector& u, const Vector& a) {
    return p->c.dot(u) + 0.5 * u.dot(p->M * u) + u.dot(p->N * a) + p->d.dot(a) + 0.5 * a.dot(p->G * a);
  };
  problem.response.grad_u = [p](const Vector& u, const Vector& a) -> Vector {
    return p->c + p->M * u + p->N * a;
  };
  problem.response.grad_alpha = [p](const Vector& u, const Vector& a) -> Vector {
    return p->N.transpose() * u + p->d + p->G * a;
  };
  problem.response.hess_uu = [p](const Vector&, const Vector&) -> Matrix { return p->M; };
  problem.response.hess_alpha_u = [p](const Vector&, const Vector&) -> Matrix { return p->N; };
  problem.response.hess_alpha_alpha = [p](const Vector&, const Vector&) -> Matrix { return p->G; };

  problem.validate();
  return problem;
}

StateVector evaluate_nominal(const Factorization& fact, const Problem& problem, SolveLedger& ledger) {
  const Vector rhs = problem.source.eval(problem.alpha0.values);
  return StateVector{solve_forward(fact, rhs, SolveKind::nominal, ledger)};
}

StateVector evaluate_nominal(const Problem& problem, SolveLedger& ledger) {
  const Factorization fact = factorize(problem.op.eval(problem.alpha0.values), ledger);
  return evaluate_nominal(fact, problem, ledger);
}

// ---------------------------------------------------------------------------
// Derivative consistency

double ConsistencyReport::worst() const {
  double w = 0.0;
  for (const auto& b : blocks) w = std::max(w, b.max_relative);
  return w;
}

const BlockDiscrepancy* ConsistencyReport::first_exceeding(double tolerance) const {
  for (const auto& b : blocks) {
    if (!(b.max_relative <= tolerance)) return &b;
  }
  return nullptr;
}

namespace {

// Accumulates |fd - analytic| and |fd| over every probe of one block; the
// block discrepancy is the ratio of the two maxima.
class BlockAccumulator {
 public:
  explicit BlockAccumulator(std::string name) : name_(std::move(name)) {}

  template <typename A, typename B>
  void add(const A& finite_difference, const B& analytic) {
    if (finite_difference.size() == 0) return;
    diff_ = std::max(diff_, (finite_difference - analytic).cwiseAbs().maxCoeff());
    fd_scale_ = std::max(fd_scale_, finite_difference.cwiseAbs().maxCoeff());
    an_scale_ = std::max(an_scale_, analytic.cwiseAbs().maxCoeff());
  }
  void add_scalar(double finite_difference, double analytic) {
    diff_ = std::max(diff_, std::abs(finite_difference - analytic));
    fd_scale_ = std::max(fd_scale_, std::abs(finite_difference));
    an_scale_ = std::max(an_scale_, std::abs(analytic));
  }

  BlockDiscrepancy result() const {
    if (!std::isfinite(diff_)) return {name_, std::numeric_limits<double>::infinity()};
    if (diff_ == 0.0) return {name_, 0.0};
    const double scale = fd_scale_ > 0.0 ? fd_scale_ : (an_scale_ > 0.0 ? an_scale_ : 1.0);
    return {name_, diff_ / scale};
  }

 private:
  std::string name_;
  double diff_ = 0.0;
  double fd_scale_ = 0.0;
  double an_scale_ = 0.0;
};

// Probe directions in state space: coordinate axes for small systems, a fixed
// pseudo-random set otherwise.
std::vector<Vector> state_directions(Index k_u) {
  std::vector<Vector> dirs;
  constexpr Index kMaxCoordinateProbes = 64;
  if (k_u <= kMaxCoordinateProbes) {
    for (Index m = 0; m < k_u; ++m) dirs.push_back(Vector::Unit(k_u, m));
    return dirs;
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int r = 0; r < 16; ++r) {
    Vector v(k_u);
    for (Index m = 0; m < k_u; ++m) v[m] = dist(rng);
    dirs.push_back(v / v.cwiseAbs().maxCoeff());
  }
  return dirs;
}

}  // namespace

ConsistencyReport check_derivative_callbacks(const Problem& problem, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("check_derivative_callbacks: step must be positive");
  const Index n = problem.parameter_count();
  const Index k_u = problem.state_size;

  BlockAccumulator op_d1("operator.d1"), op_d2("operator.d2");
  BlockAccumulator src_d1("source.d1"), src_d2("source.d2");
  BlockAccumulator r_grad_u("response.grad_u"), r_grad_alpha("response.grad_alpha");
  BlockAccumulator r_hess_uu("response.hess_uu"), r_hess_au("response.hess_alpha_u");
  BlockAccumulator r_hess_aa("response.hess_alpha_alpha");

  // Nominal point and one perturbed point, each with a deterministic trial state.
  std::vector<std::pair<Vector, Vector>> points;
  {
    const Vector& a0 = problem.alpha0.values;
    Vector u0(k_u), u1(k_u), a1 = a0;
    for (Index m = 0; m < k_u; ++m) {
      const double t = static_cast<double>(m + 1) / static_cast<double>(k_u);
      u0[m] = 1.0 + 0.5 * t;
      u1[m] = 0.75 - 0.25 * t;
    }
    for (Index k = 0; k < n; ++k) a1[k] += 1e-2 * (1.0 + std::abs(a0[k])) * (k % 2 == 0 ? 1.0 : -1.0);
    points.emplace_back(a0, u0);
    points.emplace_back(a1, u1);
  }
  const std::vector<Vector> u_dirs = state_directions(k_u);

  for (const auto& [a, u] : points) {
    for (Index k = 0; k < n; ++k) {
      const double h = step * std::max(1.0, std::abs(a[k]));
      Vector ap = a, am = a;
      ap[k] += h;
      am[k] -= h;
      const double width = ap[k] - am[k];

      op_d1.add(((problem.op.eval(ap) - problem.op.eval(am)) / width).eval(), problem.op.d1(a, k));
      src_d1.add(((problem.source.eval(ap) - problem.source.eval(am)) / width).eval(), problem.source.d1(a, k));
      for (Index j = 0; j < n; ++j) {
        op_d2.add(((problem.op.d1(ap, j) - problem.op.d1(am, j)) / width).eval(), problem.op.d2(a, j, k));
        src_d2.add(((problem.source.d1(ap, j) - problem.source.d1(am, j)) / width).eval(),
                   problem.source.d2(a, j, k));
      }

      r_grad_alpha.add_scalar((problem.response.eval(u, ap) - problem.response.eval(u, am)) / width,
                              problem.response.grad_alpha(u, a)[k]);
      r_hess_au.add(((problem.response.grad_u(u, ap) - problem.response.grad_u(u, am)) / width).eval(),
                    problem.response.hess_alpha_u(u, a).col(k).eval());
      r_hess_aa.add(((problem.response.grad_alpha(u, ap) - problem.response.grad_alpha(u, am)) / width).eval(),
                    problem.response.hess_alpha_alpha(u, a).col(k).eval());
    }

    const Vector grad_u = problem.response.grad_u(u, a);
    const Matrix hess_uu = problem.response.hess_uu(u, a);
    const double u_scale = std::max(1.0, u.cwiseAbs().maxCoeff());
    for (const Vector& v : u_dirs) {
      const double h = step * u_scale;
      const Vector up = u + h * v;
      const Vector um = u - h * v;
      r_grad_u.add_scalar((problem.response.eval(up, a) - problem.response.eval(um, a)) / (2.0 * h),
                          grad_u.dot(v));
      r_hess_uu.add(((problem.response.grad_u(up, a) - problem.response.grad_u(um, a)) / (2.0 * h)).eval(),
                    (hess_uu * v).eval());
    }
  }

  ConsistencyReport report;
  for (const auto* acc : {&op_d1, &op_d2, &src_d1, &src_d2, &r_grad_u, &r_grad_alpha, &r_hess_uu, &r_hess_au,
                          &r_hess_aa}) {
    report.blocks.push_back(acc->result());
  }
  return report;
}

}  // namespace sensas
