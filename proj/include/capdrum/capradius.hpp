#pragma once

#include <array>
#include <optional>
#include <vector>

#include "capdrum/capacity.hpp"
#include "capdrum/geometry.hpp"

namespace capdrum {

// Capacity-solver configuration shared by all radius searches.
struct CapParams {
  double h = 1.0 / 32;
  double outer_factor = 8;
  double tol = 1e-8;
  int matched_passes = 1;
  // > 0: after the search fixes a witness, re-verify it at this finer
  // spacing and attach that verdict (smaller error indicator); on failure
  // the radius steps down until the fine verdict passes.
  double verify_h = 0;
};

struct NegligibilityVerdict {
  Ball ball;
  CapacityEstimate cap_diff;  // capacity of closed ball minus domain
  double cap_ball = 0;        // exact (n-2) omega_n r^{n-2}
  double ratio = 0;           // cap_diff / cap_ball
  bool negligible = false;    // ratio <= gamma
  bool borderline = false;    // |ratio - gamma| within the capacity error
                              // indicator; treated as not negligible
  double gamma = 0;
};

// Does the domain fill the ball up to a gamma-small capacity defect?  The
// defect mask is voxelized at cap.h; cheap capacity screens (circumscribed
// ball above, isoperimetric below) decide clear cases without a solve.
NegligibilityVerdict is_negligible(const DomainSpec& domain, const Ball& ball,
                                   double gamma, const CapParams& cap);

enum class RadiusStatus { finite, infinite, zero };
enum class RadiusKind { capacitary, measure, essential };

struct SearchParams {
  Box bbox;                         // center candidates live here
  std::vector<double> radius_grid;  // ascending
  double center_spacing = 0;        // 0: use the radius grid step
  int bisect_iters = 5;             // refinement passes past the grid step
  // > 0: cap on exact capacity solves per radius during the center scan;
  // once spent, candidates the cheap screens cannot decide count as fails.
  // Only a speed valve for curated runs; 0 means unlimited.
  int solve_budget = 0;
  CapParams cap;
};

std::vector<double> linear_radius_grid(double r_min, double r_max, int steps);

struct RadiusResult {
  double radius = 0;
  std::optional<Ball> witness;  // present iff status == finite and radius > 0
  RadiusStatus status = RadiusStatus::zero;
  RadiusKind kind = RadiusKind::capacitary;
  double center_spacing = 0;
  double radius_step = 0;
  std::vector<double> radius_grid;
  // Largest tested radius passed and doubling probes passed too: the
  // supremum exceeds the search range; radius holds the top probe value.
  bool truncation_warning = false;
  std::optional<NegligibilityVerdict> witness_verdict;
  // (R, radius of domain minus closed R-ball) pairs, essential kind only.
  std::vector<std::array<double, 2>> essential_sequence;
};

// Largest radius on the grid for which some candidate center gives a
// negligible verdict, refined by one bisection pass toward the next grid
// radius.  The full grid is scanned: negligibility is not monotone in r.
RadiusResult capacitary_radius(const DomainSpec& domain, double gamma,
                               const SearchParams& search);

// Same scan once, verdicts shared across gammas (ascending); guarantees the
// reported radii are monotone in gamma.
std::vector<RadiusResult> capacitary_radius_multi(
    const DomainSpec& domain, const std::vector<double>& gammas,
    const SearchParams& search);

// Volume variant: mes(B_r minus domain) <= alpha mes(B_r).
RadiusResult measure_radius(const DomainSpec& domain, double alpha,
                            const SearchParams& search);

// Capacitary radius of the domain minus the closed R-ball at the origin for
// each R in the ascending schedule; the last value is returned with the
// whole sequence attached.
RadiusResult essential_radius(const DomainSpec& domain, double gamma,
                              const std::vector<double>& R_schedule,
                              const SearchParams& search);

}  // namespace capdrum
