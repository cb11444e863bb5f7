#include "sensas/paradigm.hpp"

#include "sensas/errors.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace sensas {

std::string_view to_string(SlabResponse kind) {
  return kind == SlabResponse::linear_detector ? "linear_detector" : "quadratic_norm";
}

namespace {

constexpr double kFractionTolerance = 1e-12;

bool finite(double v) { return std::isfinite(v); }

std::vector<double> region_bounds(const SlabConfig& cfg) {
  std::vector<double> bounds{0.0};
  for (const auto& r : cfg.regions) bounds.push_back(bounds.back() + r.span);
  bounds.back() = 1.0;
  return bounds;
}

// Region containing a face midpoint at fractional position s.
std::size_t face_region(const std::vector<double>& bounds, double s) {
  const std::size_t regions = bounds.size() - 1;
  for (std::size_t r = 0; r + 1 < regions; ++r) {
    if (s < bounds[r + 1]) return r;
  }
  return regions - 1;
}

// Regions (with weights summing to one) contributing node-centred data at s.
std::vector<std::pair<std::size_t, double>> node_regions(const std::vector<double>& bounds, double s) {
  const std::size_t regions = bounds.size() - 1;
  for (std::size_t r = 1; r < regions; ++r) {
    if (std::abs(s - bounds[r]) <= kFractionTolerance) return {{r - 1, 0.5}, {r, 0.5}};
  }
  return {{face_region(bounds, s), 1.0}};
}

}  // namespace

void SlabConfig::validate() const {
  if (!(length > 0.0) || !finite(length)) throw ShapeError("slab.length", "must be positive");
  if (cells < 3) throw ShapeError("slab.cells", "must be at least 3");
  if (regions.empty()) throw ShapeError("region", "at least one region is required");
  double total = 0.0;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto& reg = regions[r];
    const std::string field = "region " + std::to_string(r + 1);
    if (!(reg.span > 0.0) || !finite(reg.span)) throw ShapeError(field, "span fraction must be positive");
    if (!(reg.diffusion > 0.0) || !finite(reg.diffusion)) throw ShapeError(field, "diffusion coefficient must be positive");
    if (!(reg.absorption >= 0.0) || !finite(reg.absorption)) throw ShapeError(field, "absorption must be non-negative");
    if (!finite(reg.source)) throw ShapeError(field, "source must be finite");
    total += reg.span;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ShapeError("region", "span fractions sum to " + std::to_string(total) + ", expected 1");
  }
  if (!(detector.lo >= 0.0 && detector.lo <= detector.hi && detector.hi <= 1.0)) {
    throw ShapeError("detector", "extent must satisfy 0 <= lo <= hi <= 1");
  }
  if (!finite(detector.sigma)) throw ShapeError("detector", "coefficient must be finite");
}

ParameterVector slab_parameters(const SlabConfig& cfg) {
  const auto r_count = cfg.regions.size();
  ParameterVector p;
  p.values.resize(static_cast<Index>(3 * r_count));
  p.names.resize(3 * r_count);
  for (std::size_t r = 0; r < r_count; ++r) {
    const auto id = std::to_string(r + 1);
    p.values[static_cast<Index>(r)] = cfg.regions[r].diffusion;
    p.values[static_cast<Index>(r_count + r)] = cfg.regions[r].absorption;
    p.values[static_cast<Index>(2 * r_count + r)] = cfg.regions[r].source;
    p.names[r] = "D" + id;
    p.names[r_count + r] = "Sigma_a" + id;
    p.names[2 * r_count + r] = "S" + id;
  }
  return p;
}

AffineQuadraticProblem slab_affine_data(const SlabConfig& cfg) {
  cfg.validate();
  const Index n = cfg.cells;
  const auto r_count = static_cast<Index>(cfg.regions.size());
  const double dx = cfg.length / static_cast<double>(n + 1);
  const double face_coeff = 1.0 / (dx * dx);
  const std::vector<double> bounds = region_bounds(cfg);

  AffineQuadraticProblem data = AffineQuadraticProblem::zeros(n, 3 * r_count);

  // Face f sits between nodes f-1 and f; nodes -1 and n carry the Dirichlet zeros.
  for (Index f = 0; f <= n; ++f) {
    const double mid = (static_cast<double>(f) + 0.5) / static_cast<double>(n + 1);
    Matrix& dD = data.L[face_region(bounds, mid)];
    const bool left = f - 1 >= 0;
    const bool right = f <= n - 1;
    if (left) dD(f - 1, f - 1) += face_coeff;
    if (right) dD(f, f) += face_coeff;
    if (left && right) {
      dD(f - 1, f) -= face_coeff;
      dD(f, f - 1) -= face_coeff;
    }
  }

  for (Index i = 0; i < n; ++i) {
    const double s = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    for (const auto& [r, w] : node_regions(bounds, s)) {
      const auto ri = static_cast<Index>(r);
      data.L[static_cast<std::size_t>(r_count + ri)](i, i) += w;
      data.q[static_cast<std::size_t>(2 * r_count + ri)][i] += w;
    }
    if (cfg.response_kind == SlabResponse::linear_detector) {
      if (s >= cfg.detector.lo - kFractionTolerance && s <= cfg.detector.hi + kFractionTolerance) {
        data.c[i] = cfg.detector.sigma * dx;
      }
    }
  }
  if (cfg.response_kind == SlabResponse::quadratic_norm) data.M = dx * Matrix::Identity(n, n);
  return data;
}

Problem build_slab_diffusion(const SlabConfig& cfg) {
  return build_affine_quadratic_problem(slab_affine_data(cfg), slab_parameters(cfg));
}

SlabConfig fixture_d1_config() {
  SlabConfig cfg;
  cfg.length = 10.0;
  cfg.cells = 50;
  cfg.regions = {SlabRegion{1.0, 1.0, 0.1, 1.0}};
  cfg.detector = SlabDetector{0.0, 1.0, 1.0};
  cfg.response_kind = SlabResponse::linear_detector;
  return cfg;
}

SlabConfig fixture_d2_config() {
  SlabConfig cfg = fixture_d1_config();
  cfg.response_kind = SlabResponse::quadratic_norm;
  return cfg;
}

AffineQuadraticProblem scalar_fixture_data() {
  AffineQuadraticProblem data = AffineQuadraticProblem::zeros(1, 2);
  data.L[0](0, 0) = 1.0;
  data.q[1][0] = 1.0;
  data.c[0] = 1.0;
  return data;
}

ParameterVector scalar_fixture_alpha0() {
  ParameterVector p;
  p.values = Vector{{2.0, 4.0}};
  p.names = {"alpha1", "alpha2"};
  return p;
}

Problem build_scalar_fixture() { return build_affine_quadratic_problem(scalar_fixture_data(), scalar_fixture_alpha0()); }

}  // namespace sensas
