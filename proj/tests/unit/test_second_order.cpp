#include "sensas/errors.hpp"
#include "sensas/oracle.hpp"
#include "sensas/paradigm.hpp"
#include "sensas/second_order.hpp"
#include "support.hpp"

using namespace sensas;
using namespace sensas::testing;

namespace {

struct Adjoint {
  NominalSystem sys;
  StateVector u0;
  AdjointVector psi0;
  explicit Adjoint(const Problem& p) : sys(p), u0(evaluate_nominal(sys)), psi0(adjoint_solve(sys, u0)) {}
};

const Matrix kP1Hessian{{1.0, -0.25}, {-0.25, 0.0}};

}  // namespace

TEST_CASE("SASS sources on P1") {
  Adjoint a(build_scalar_fixture());
  const SassSources s1 = sass_sources(a.sys, a.u0, a.psi0, 0);
  CHECK(s1.grad_psi[0] == -2.0);
  CHECK(s1.grad_u[0] == -0.5);
  const SassSources s2 = sass_sources(a.sys, a.u0, a.psi0, 1);
  CHECK(s2.grad_psi[0] == 1.0);
  CHECK(s2.grad_u[0] == 0.0);
  CHECK_THROWS_AS(sass_sources(a.sys, a.u0, a.psi0, 2), IndexError);
  CHECK_THROWS_AS(sass_sources(a.sys, a.u0, a.psi0, -1), IndexError);
}

TEST_CASE("SASS pairs on P1") {
  Adjoint a(build_scalar_fixture());
  SolveLedger ledger;
  const SassPair p1 = sass_solve(a.sys, a.u0, sass_sources(a.sys, a.u0, a.psi0, 0), 0, ledger);
  CHECK(p1.psi2.values[0] == -1.0);
  CHECK(p1.psi1.values[0] == -0.25);
  const SassPair p2 = sass_solve(a.sys, a.u0, sass_sources(a.sys, a.u0, a.psi0, 1), 1, ledger);
  CHECK(p2.psi2.values[0] == 0.5);
  CHECK(p2.psi1.values[0] == 0.0);
  CHECK(ledger.sensitivity_total() == 4);

  const SassPair zero = sass_solve(a.sys, a.u0, SassSources{Vector::Zero(1), Vector::Zero(1)}, 0, ledger);
  CHECK(zero.psi1.values[0] == 0.0);
  CHECK(zero.psi2.values[0] == 0.0);
}

TEST_CASE("direct and indirect rows on P1") {
  Adjoint a(build_scalar_fixture());
  CHECK(direct_effect_row(a.sys, a.u0, a.psi0, 0) == Vector::Zero(2));
  SolveLedger ledger;
  for (Index i = 0; i < 2; ++i) {
    const SassPair pair = sass_solve(a.sys, a.u0, sass_sources(a.sys, a.u0, a.psi0, i), i, ledger);
    const Vector row = indirect_effect_row(a.sys, a.u0, a.psi0, pair);
    CHECK(row[0] == kP1Hessian(i, 0));
    CHECK(row[1] == kP1Hessian(i, 1));
  }
  SassPair zero{AdjointVector{Vector::Zero(1)}, AdjointVector{Vector::Zero(1)}, 0};
  CHECK(indirect_effect_row(a.sys, a.u0, a.psi0, zero) == Vector::Zero(2));
}

TEST_CASE("direct-effect row picks up G and the quadratic source term") {
  AffineQuadraticProblem d = AffineQuadraticProblem::zeros(1, 2);
  d.L0(0, 0) = 2.0;
  d.c[0] = 1.0;
  d.G = Matrix{{3.0, 0.0}, {0.0, 7.0}};
  Adjoint g(build_affine_quadratic_problem(d, ParameterVector{Vector{{0.4, -1.2}}, {}}));
  CHECK(direct_effect_row(g.sys, g.u0, g.psi0, 0) == Vector{{3.0, 0.0}});
  CHECK(direct_effect_row(g.sys, g.u0, g.psi0, 1) == Vector{{0.0, 7.0}});

  d.G.setZero();
  d.q2.set(0, 1, Vector{{1.0}});
  Adjoint q(build_affine_quadratic_problem(d, ParameterVector{Vector{{0.4, -1.2}}, {}}));
  REQUIRE(q.psi0.values[0] == 0.5);
  CHECK(direct_effect_row(q.sys, q.u0, q.psi0, 0)[1] == 0.5);
}

TEST_CASE("SO-ASAP on P1") {
  const HessianMatrix h = so_asap_hessian(build_scalar_fixture());
  CHECK(h.method == HessianMethod::so_asap);
  CHECK(max_abs(Matrix(h.values - kP1Hessian)) <= 1e-12);
  CHECK(h.ledger.sensitivity_total() == 5);
  CHECK(h.ledger.factorizations == 1);
  CHECK(h.asymmetry == 0.0);
  CHECK_FALSE(h.symmetrized);
}

TEST_CASE("SO-FSAP on P1") {
  const HessianMatrix h = so_fsap_hessian(build_scalar_fixture());
  CHECK(h.method == HessianMethod::so_fsap);
  CHECK(max_abs(Matrix(h.values - kP1Hessian)) <= 1e-12);
  CHECK(h.ledger.forward_sensitivity_solves == 2);
  CHECK(h.ledger.adjoint_solves == 3);
}

TEST_CASE("SO-FSAP reuses forward sensitivities from FSAP") {
  Adjoint a(build_scalar_fixture());
  fsap_gradient(a.sys, a.u0);
  const SolveLedger before = a.sys.ledger();
  const HessianMatrix h = so_fsap_hessian(a.sys, a.u0, a.psi0);
  CHECK(h.ledger.forward_sensitivity_solves == before.forward_sensitivity_solves);
  CHECK(h.ledger.adjoint_solves == before.adjoint_solves + 2);
}

TEST_CASE("Hessian is G for a parameter-independent system") {
  std::mt19937 rng(43);
  AffineQuadraticProblem d = random_affine_data(rng, {4, 3, false, true});
  for (auto& l : d.L) l.setZero();
  for (auto& q : d.q) q.setZero();
  d.N.setZero();
  const Problem p = build_affine_quadratic_problem(d, random_alpha(rng, 3));
  CHECK(so_asap_hessian(p).values == d.G);
  CHECK(so_fsap_hessian(p).values == d.G);
}

TEST_CASE("single parameter costs three solves") {
  std::mt19937 rng(47);
  const Problem p = random_problem(rng, {5, 1});
  const HessianMatrix h = so_asap_hessian(p);
  CHECK(h.values.rows() == 1);
  CHECK(h.ledger.sensitivity_total() == 3);
}

TEST_CASE("count law over parameter counts") {
  std::mt19937 rng(53);
  for (Index n : {1, 2, 3, 5, 8, 20}) {
    const Problem p = random_problem(rng, {6, n});
    CHECK(so_asap_hessian(p).ledger.sensitivity_total() == so_asap_nominal_count(n));
    CHECK(so_fsap_hessian(p).ledger.sensitivity_total() == 2 * n + 1);
  }
  CHECK(so_fsap_nominal_count(3) == 9);
  CHECK(so_fsap_nominal_count(5) == 20);
  CHECK(so_asap_nominal_count(2) == 5);
}

TEST_CASE("D1 and D2: methods agree with each other and with finite differences") {
  for (const SlabConfig& cfg : {fixture_d1_config(), fixture_d2_config()}) {
    const Problem p = build_slab_diffusion(cfg);
    const HessianMatrix as = so_asap_hessian(p);
    const HessianMatrix fs = so_fsap_hessian(p);
    const HessianMatrix fd = fd_hessian(p);
    const double scale = 1.0 + max_abs(as.values);
    CHECK(max_abs(Matrix(as.values - fs.values)) <= 1e-9 * scale);
    CHECK(max_abs(Matrix(as.values - fd.values)) <= 1e-4 * scale);
    CHECK(as.asymmetry <= 1e-9 * scale);
  }
}

TEST_CASE("D1 source block of the Hessian vanishes") {
  const HessianMatrix h = so_asap_hessian(build_slab_diffusion(fixture_d1_config()));
  CHECK(std::abs(h.values(2, 2)) <= 1e-12 * (1.0 + max_abs(h.values)));
}

TEST_CASE("symmetrize option") {
  std::mt19937 rng(59);
  const Problem p = random_problem(rng, {4, 3});
  const HessianMatrix raw = so_asap_hessian(p);
  const HessianMatrix sym = so_asap_hessian(p, HessianOptions{true});
  CHECK(sym.symmetrized);
  CHECK(sym.asymmetry == raw.asymmetry);
  CHECK(sym.values == sym.values.transpose());
  CHECK(max_abs(Matrix(sym.values - 0.5 * (raw.values + raw.values.transpose()))) == 0.0);
}

TEST_CASE("max_asymmetry") {
  CHECK(max_asymmetry(Matrix{{1.0, 2.0}, {2.5, 0.0}}) == 0.5);
  CHECK(max_asymmetry(Matrix::Identity(3, 3)) == 0.0);
}

TEST_CASE("the second adjoint vanishes when nothing drives it") {
  Adjoint a(build_scalar_fixture());
  SolveLedger ledger;
  const SassPair pair = sass_solve(a.sys, a.u0, sass_sources(a.sys, a.u0, a.psi0, 1), 1, ledger);
  CHECK(pair.psi1.values == Vector::Zero(1));
}

TEST_CASE("Hessian contraction reproduces the gradient difference on D1") {
  const Problem p = build_slab_diffusion(fixture_d1_config());
  const HessianMatrix h = so_asap_hessian(p);
  const Vector dir{{0.3, 0.02, 0.5}};
  auto gradient_at = [&](const Vector& alpha) {
    Adjoint a(p.at(alpha));
    return asap_gradient(a.sys, a.u0, a.psi0).values;
  };
  const Vector s0 = gradient_at(p.alpha0.values);
  const std::vector<double> eps{1e-2, 1e-3, 1e-4};
  std::vector<double> err;
  for (double e : eps) {
    const Vector se = gradient_at(p.alpha0.values + e * dir);
    err.push_back(max_abs(Vector((se - s0) / e - h.values * dir)));
  }
  for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
    CHECK(std::log(err[i] / err[i + 1]) / std::log(eps[i] / eps[i + 1]) >= 0.9);
  }
}

TEST_CASE("serial and parallel execution give identical Hessians") {
  std::mt19937 rng(61);
  const Problem p = random_problem(rng, {30, 6});
  const HessianMatrix s = so_asap_hessian(p, {}, Execution::serial);
  const HessianMatrix q = so_asap_hessian(p, {}, Execution::parallel);
  CHECK(s.values == q.values);
  CHECK(s.ledger == q.ledger);
  CHECK(so_fsap_hessian(p, {}, Execution::serial).values == so_fsap_hessian(p, {}, Execution::parallel).values);
}
