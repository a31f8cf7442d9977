#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "capdrum/geometry.hpp"

namespace capdrum {

enum class CapacityMethod { grid, wos, analytic };

struct CapacityEstimate {
  double value = 0;
  CapacityMethod method = CapacityMethod::analytic;
  double resolution = 0;       // grid: h; wos: walk count
  double error_indicator = 0;  // grid: |value(h) - value(2h)|; wos: std error
  bool single_cell_warning = false;
};

// Equilibrium-potential samples on the uniform core region of the solve.
struct PotentialField {
  Vec origin;
  double h = 1;
  std::array<int, 4> dims{1, 1, 1, 1};
  int dim = 3;
  std::vector<double> values;

  std::int64_t cell_count() const {
    std::int64_t c = 1;
    for (int a = 0; a < dim; ++a) c *= dims[a];
    return c;
  }
  Vec cell_center(std::int64_t flat) const;
};

struct GridCapacityOptions {
  double outer_factor = 8.0;  // outer radius = outer_factor * mask hull radius
  double tol = 1e-8;          // relative residual for the linear solves
  int max_iterations = 50000;
  int matched_passes = 1;     // decay-matched re-solves after the u=0 pass
  double stretch_ratio = 1.18;   // far-field cell growth per step
  bool with_indicator = true;    // also solve at 2h for the error indicator
  bool keep_potential = true;
  std::optional<Box> field_region;  // uniform core must cover this region
};

struct GridCapacityResult {
  CapacityEstimate estimate;
  PotentialField potential;
  double flux_diagnostic = 0;  // discrete boundary flux, internal cross-check
};

GridCapacityResult capacity_grid(const CompactMask& mask, double outer_factor,
                                 double h, double tol);
GridCapacityResult capacity_grid(const CompactMask& mask,
                                 const GridCapacityOptions& opts);

CapacityEstimate capacity_wos(const CompactMask& mask, std::int64_t walks,
                              double probe_r1, double probe_r2,
                              std::uint64_t seed = 0);

// Equilibrium potential of the closed r-ball at distance x_dist from its
// center: 1 inside, (r/x)^{n-2} outside.
double ball_potential(double r, double x_dist, int n);

// Newtonian potential of the uniformly charged spherical layer
// {r1 <= |x| <= r2} with unit density, at distance y_dist; C^1 across the
// two branch radii.
double layer_potential(double r1, double r2, double y_dist, int n);

}  // namespace capdrum
