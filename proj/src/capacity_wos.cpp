#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "capdrum/capacity.hpp"
#include "capdrum/constants.hpp"
#include "capdrum/errors.hpp"
#include "capdrum/geometry.hpp"
#include "edt.hpp"
#include "rng.hpp"

namespace capdrum {

namespace {

// The walk target is the union of closed h/2 balls centered at the occupied
// cell centers.  A walker hits when it comes within kAbsorbFrac*h of that
// union; jumps use exact distances near the mask and conservative lower
// bounds elsewhere, so the absorb shell is the only discretization of the
// walk itself.
constexpr double kAbsorbFrac = 0.125;
constexpr int kWin = 6;           // exact-scan half-width, cells
constexpr int kMaxSteps = 200000;  // treated as escape when exceeded

struct WalkField {
  const CompactMask* mask;
  std::array<std::int64_t, 4> stride;
  std::vector<double> node_dist;  // distance from cell center to nearest
                                  // occupied center, absolute units
  Vec centroid;
  double cloud_radius;  // max |occupied center - centroid|
  double h;
  int dim;

  std::int64_t flat(const std::array<int, 4>& idx) const {
    std::int64_t f = 0;
    for (int a = dim - 1; a >= 0; --a) f = f * mask->dims[a] + idx[a];
    return f;
  }
};

WalkField build_field(const CompactMask& mask, const MaskStats& st) {
  WalkField w;
  w.mask = &mask;
  w.h = mask.h;
  w.dim = mask.dim;
  w.centroid = st.centroid;
  w.cloud_radius = 0;
  std::int64_t total = mask.cell_count();
  std::vector<double> f(static_cast<std::size_t>(total), detail::kEdtInf);
  for (std::int64_t i = 0; i < total; ++i) {
    if (!mask.occupancy[static_cast<std::size_t>(i)]) continue;
    f[static_cast<std::size_t>(i)] = 0;
    Vec d = mask.cell_center(i) - st.centroid;
    w.cloud_radius = std::max(w.cloud_radius, norm(d));
  }
  detail::edt_squared(f, mask.dims, mask.dim);
  w.node_dist.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    w.node_dist[i] = std::sqrt(f[i]) * mask.h;
  std::int64_t s = 1;
  for (int a = 0; a < mask.dim; ++a) {
    w.stride[a] = s;
    s *= mask.dims[a];
  }
  return w;
}

// Clamped cell index of a point (valid even outside the grid box).
std::array<int, 4> clamped_index(const WalkField& w, const Vec& x) {
  std::array<int, 4> idx{0, 0, 0, 0};
  for (int a = 0; a < w.dim; ++a) {
    double t = (x[a] - w.mask->origin[a]) / w.h;
    int i = static_cast<int>(std::floor(t));
    idx[a] = std::clamp(i, 0, w.mask->dims[a] - 1);
  }
  return idx;
}

// Exact distance from x to the occupied-center cloud, scanning a window of
// half-width kWin cells.  Returns min(true distance, (kWin - 0.5) h); the
// cap is itself a valid lower bound, so a capped return still gives a safe
// jump.  Early-outs as soon as a center inside the absorb shell is found.
double window_distance(const WalkField& w, const Vec& x) {
  const double cap = (kWin - 0.5) * w.h;
  std::array<int, 4> c = clamped_index(w, x);
  std::array<int, 4> lo{0, 0, 0, 0}, hi{0, 0, 0, 0}, it{0, 0, 0, 0};
  for (int a = 0; a < w.dim; ++a) {
    lo[a] = std::max(0, c[a] - kWin);
    hi[a] = std::min(w.mask->dims[a] - 1, c[a] + kWin);
    it[a] = lo[a];
  }
  const double absorb = (0.5 + kAbsorbFrac) * w.h;
  double best2 = cap * cap;
  while (true) {
    std::int64_t f = 0;
    for (int a = w.dim - 1; a >= 0; --a) f = f * w.mask->dims[a] + it[a];
    if (w.mask->occupancy[static_cast<std::size_t>(f)]) {
      double d2 = 0;
      for (int a = 0; a < w.dim; ++a) {
        double e = x[a] - (w.mask->origin[a] + (it[a] + 0.5) * w.h);
        d2 += e * e;
      }
      if (d2 < best2) {
        best2 = d2;
        if (best2 <= absorb * absorb) break;
      }
    }
    int a = 0;
    while (a < w.dim && ++it[a] > hi[a]) {
      it[a] = lo[a];
      ++a;
    }
    if (a == w.dim) break;
  }
  return std::sqrt(best2);
}

// Lower bound on distance from x to the cloud, from the node EDT and the
// centroid hull; cheap, used to take long jumps far from the mask.
double cloud_lower_bound(const WalkField& w, const Vec& x) {
  double lb = norm(x - w.centroid) - w.cloud_radius;
  std::array<int, 4> c = clamped_index(w, x);
  std::int64_t f = 0;
  for (int a = w.dim - 1; a >= 0; --a) f = f * w.mask->dims[a] + c[a];
  Vec node = w.mask->cell_center(f);
  double e = norm(x - node);
  lb = std::max(lb, w.node_dist[static_cast<std::size_t>(f)] - e);
  return std::max(lb, 0.0);
}

Vec random_direction(detail::SplitMix64& rng, int dim) {
  while (true) {
    std::array<double, 4> g{0, 0, 0, 0};
    for (int a = 0; a < dim; a += 2) {
      double z0, z1;
      rng.normal_pair(z0, z1);
      g[a] = z0;
      if (a + 1 < dim) g[a + 1] = z1;
    }
    Vec v = Vec::zeros(dim);
    double n2 = 0;
    for (int a = 0; a < dim; ++a) {
      v[a] = g[a];
      n2 += g[a] * g[a];
    }
    if (n2 > 1e-24) {
      double inv = 1.0 / std::sqrt(n2);
      for (int a = 0; a < dim; ++a) v[a] *= inv;
      return v;
    }
  }
}

// One walk.  Absorption reports death_radius = 0; escape reports the radius
// at which the walker was actually killed, which can overshoot kill_radius
// by a long jump, so the caller must not assume death happened at the kill
// sphere.  Step-budget exhaustion counts as an escape that never returns.
struct WalkOutcome {
  bool hit = false;
  double death_radius = 0;
};

WalkOutcome run_walk(const WalkField& w, double start_radius,
                     double kill_radius, detail::SplitMix64& rng) {
  const double absorb = kAbsorbFrac * w.h;
  const double near = 3.0 * w.h;
  Vec x = w.centroid + start_radius * random_direction(rng, w.dim);
  for (int step = 0; step < kMaxSteps; ++step) {
    double rad = norm(x - w.centroid);
    if (rad >= kill_radius) return {false, rad};
    double lb = cloud_lower_bound(w, x) - 0.5 * w.h;
    double r;
    if (lb > near) {
      r = lb;
    } else {
      double d = window_distance(w, x) - 0.5 * w.h;
      if (d <= absorb) return {true, 0};
      r = d;
    }
    x = x + r * random_direction(rng, w.dim);
  }
  return {false, std::numeric_limits<double>::infinity()};
}

struct ProbeResult {
  double cap = 0;
  double se = 0;
};

// Hitting probability from radius R, corrected for the finite kill sphere by
// the renewal identity.  A walker killed at radius rho would re-enter the
// start sphere with probability (R/rho)^{n-2} and face the same gamble, so
// with X = 1{hit} and Y = (R/rho)^{n-2} 1{escape} the true probability
// solves p = E[X] + E[Y] p, i.e. p = mean(X) / (1 - mean(Y)).  Long jumps
// overshoot the kill sphere, so rho must be the observed death radius, not
// kill_radius: the fixed-q form overstates re-entry and inflates p as R
// approaches the kill sphere.  Standard error is the delta method for the
// ratio; X Y = 0 identically, so cov(X, Y) = -E[X] E[Y].
ProbeResult probe(const WalkField& w, double R, double kill_radius,
                  std::int64_t walks, std::uint64_t seed,
                  std::uint64_t stream) {
  int n = w.dim;
  double sum_x = 0, sum_y = 0, sum_y2 = 0;
  for (std::int64_t i = 0; i < walks; ++i) {
    detail::SplitMix64 rng(
        detail::mix_seed(seed, stream * 0x100000000ULL + std::uint64_t(i)));
    WalkOutcome o = run_walk(w, R, kill_radius, rng);
    if (o.hit) {
      sum_x += 1;
    } else if (std::isfinite(o.death_radius)) {
      double y = std::pow(R / o.death_radius, n - 2);
      sum_y += y;
      sum_y2 += y * y;
    }
  }
  double inv_w = 1.0 / double(walks);
  double mx = sum_x * inv_w;
  double my = sum_y * inv_w;
  double denom = 1.0 - my;
  double p = mx / denom;
  double cap_ball = ball_capacity(n, R);
  ProbeResult out;
  out.cap = p * cap_ball;
  double var_x = mx * (1.0 - mx);
  double var_y = sum_y2 * inv_w - my * my;
  double cov_xy = -mx * my;
  double g_x = 1.0 / denom;
  double g_y = mx / (denom * denom);
  double var_p = (g_x * g_x * var_x + 2.0 * g_x * g_y * cov_xy +
                  g_y * g_y * var_y) *
                 inv_w;
  out.se = cap_ball * std::sqrt(std::max(var_p, 0.0));
  return out;
}

}  // namespace

CapacityEstimate capacity_wos(const CompactMask& mask, std::int64_t walks,
                              double probe_r1, double probe_r2,
                              std::uint64_t seed) {
  if (mask.dim < 3) throw InvalidDimension("walk estimator requires dimension >= 3");
  if (walks <= 0) throw InvalidParameter("walk count must be positive");
  if (!(probe_r1 > 0) || !(probe_r2 > probe_r1))
    throw InvalidParameter("probe radii must satisfy 0 < r1 < r2");

  CapacityEstimate est;
  est.method = CapacityMethod::wos;
  est.resolution = double(walks);
  MaskStats st = mask_stats(mask);
  if (st.count == 0) return est;
  est.single_cell_warning = (st.count == 1);

  if (probe_r1 < 2.0 * st.hull_radius)
    throw InvalidParameter("first probe radius must be at least twice the mask hull radius");

  WalkField w = build_field(mask, st);
  double kill_radius = std::max(50.0 * st.hull_radius, 4.0 * probe_r2);

  std::int64_t n1 = (walks + 1) / 2;
  std::int64_t n2 = walks - n1;
  if (n2 == 0) n2 = n1;  // single-walk degenerate case: reuse the stream
  ProbeResult a = probe(w, probe_r1, kill_radius, n1, seed, 1);
  ProbeResult b = probe(w, probe_r2, kill_radius, n2, seed, 2);

  // cap(R) = cap + b R^{2-n} to leading order; eliminate the R^{2-n} term.
  int n = mask.dim;
  double x1 = std::pow(probe_r1, 2 - n);
  double x2 = std::pow(probe_r2, 2 - n);
  double w1 = x2 / (x2 - x1);
  double w2 = -x1 / (x2 - x1);
  est.value = w1 * a.cap + w2 * b.cap;
  est.error_indicator =
      std::sqrt(w1 * w1 * a.se * a.se + w2 * w2 * b.se * b.se);
  return est;
}

}  // namespace capdrum
