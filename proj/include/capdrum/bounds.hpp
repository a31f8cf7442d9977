#pragma once

#include <optional>
#include <vector>

#include "capdrum/capradius.hpp"
#include "capdrum/constants.hpp"
#include "capdrum/geometry.hpp"
#include "capdrum/spectrum.hpp"

namespace capdrum {

// Finite-difference reference eigenvalue attached to a bounds report.
struct OracleParams {
  bool enabled = false;
  double h = 1.0 / 32;
  double tol = 1e-6;
  std::optional<Box> bbox;   // default: the search box
  double widen_factor = 0;   // >1: remove bbox truncation by 1/L^2 model
  bool with_construction = false;  // also evaluate the trial-function bound
};

enum class Verdict { sandwich_holds, violated_lower, violated_upper, oracle_missing };

struct BoundsReport {
  double gamma = 0;
  int n = 3;
  RadiusResult radius;
  ExplicitConstants constants;
  // c r^-2 and C r^-2; +inf sentinels when radius is 0, both 0 under the
  // infinite-radius truncation warning (the lambda = 0 reading).
  double lower = 0;
  std::optional<double> upper;
  std::optional<EigenResult> oracle_lambda;
  std::optional<double> construction_upper;  // trial-function Rayleigh value
  Verdict verdict = Verdict::oracle_missing;
  // declared tolerance composition; the verdict tests
  // lower (1 - eps) <= lambda <= upper (1 + eps) with eps = eps_total
  double eps_radius = 0;
  double eps_cap = 0;
  double eps_eig = 0;
  double eps_total = 0;
  bool discrete_spectrum = false;  // essential kind with radius 0
  std::optional<double> alpha;     // measure-based lower bound only
};

BoundsReport two_sided(const DomainSpec& domain, double gamma,
                       const SearchParams& search,
                       const OracleParams& oracle = {});

// Assembly step of two_sided for callers that already own the radius result
// and the (gamma-independent) oracle eigenvalue: constants, bounds, tolerance
// composition, verdict.
BoundsReport report_from_radius(int n, double gamma, const RadiusResult& radius,
                                const std::optional<EigenResult>& oracle);

// Measure-based lower bound: gamma = alpha^{(n-2)/n}, radius from the
// volume test; no upper bound.
BoundsReport lieb_lower(const DomainSpec& domain, double alpha,
                        const SearchParams& search);

// Bounds for the bottom of the essential spectrum from the radius of the
// domain with growing balls removed.
BoundsReport essential_bounds(const DomainSpec& domain, double gamma,
                              const std::vector<double>& R_schedule,
                              const SearchParams& search);

}  // namespace capdrum
