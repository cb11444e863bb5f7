#pragma once

#include "sensas/model.hpp"

#include <string_view>
#include <vector>

namespace sensas {

enum class SlabResponse { linear_detector, quadratic_norm };
std::string_view to_string(SlabResponse kind);

struct SlabRegion {
  double span = 1.0;        // fraction of the slab length
  double diffusion = 1.0;   // D (cm)
  double absorption = 0.0;  // Sigma_a (1/cm)
  double source = 0.0;      // S (1/cm^3 s)
};

struct SlabDetector {
  double lo = 0.0;  // fractional extent
  double hi = 1.0;
  double sigma = 1.0;  // Sigma_d (1/cm)
};

/// One-group diffusion on a slab, -d/dx(D du/dx) + Sigma_a u = S, u = 0 at both ends.
struct SlabConfig {
  double length = 1.0;
  Index cells = 3;
  std::vector<SlabRegion> regions;
  SlabDetector detector;
  SlabResponse response_kind = SlabResponse::linear_detector;

  /// Throws ShapeError naming the offending field.
  void validate() const;
};

/// Parameters (D_1..D_r, Sigma_a_1..Sigma_a_r, S_1..S_r) at their configured values.
ParameterVector slab_parameters(const SlabConfig& cfg);

/// Central differences on `cells` interior nodes with spacing length/(cells+1).
/// D lives on cell faces (the region containing the face midpoint), Sigma_a and S
/// on nodes, averaged across a region boundary that falls exactly on a node.
AffineQuadraticProblem slab_affine_data(const SlabConfig& cfg);

Problem build_slab_diffusion(const SlabConfig& cfg);

/// D1: length 10, 50 cells, one region (D = 1, Sigma_a = 0.1, S = 1), whole-slab detector.
SlabConfig fixture_d1_config();
/// D2: D1 with the quadratic-norm response.
SlabConfig fixture_d2_config();

/// P1: L(a) = [a1], Q(a) = [a2], R = u1, alpha0 = (2, 4).
AffineQuadraticProblem scalar_fixture_data();
ParameterVector scalar_fixture_alpha0();
Problem build_scalar_fixture();

}  // namespace sensas
