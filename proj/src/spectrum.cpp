#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "capdrum/capacity.hpp"
#include "capdrum/capradius.hpp"
#include "capdrum/constants.hpp"
#include "capdrum/errors.hpp"
#include "capdrum/spectrum.hpp"

namespace capdrum {

namespace {

// (2n+1)-point Dirichlet Laplacian restricted to inside cells; outside cells
// (and everything beyond the grid box) are held at zero.
struct Stencil {
  int dim = 3;
  double inv_h2 = 1;
  std::int64_t count = 0;                 // inside cells
  std::vector<std::int64_t> flat_of;      // compact -> flat
  std::vector<std::int32_t> neighbors;    // 2*dim per cell, -1 when absent
};

Stencil build_stencil(const VoxelGrid& g) {
  Stencil s;
  s.dim = g.dim;
  s.inv_h2 = 1.0 / (g.h * g.h);
  std::int64_t total = g.cell_count();
  std::vector<std::int32_t> compact(static_cast<std::size_t>(total), -1);
  for (std::int64_t f = 0; f < total; ++f) {
    if (!g.occupancy[static_cast<std::size_t>(f)]) continue;
    compact[static_cast<std::size_t>(f)] =
        static_cast<std::int32_t>(s.flat_of.size());
    s.flat_of.push_back(f);
  }
  s.count = static_cast<std::int64_t>(s.flat_of.size());
  if (s.count == 0) throw EmptyDomain("no interior cells: the bottom of the spectrum is +inf");

  std::array<std::int64_t, 4> stride{1, 1, 1, 1};
  for (int a = 1; a < g.dim; ++a) stride[a] = stride[a - 1] * g.dims[a - 1];
  s.neighbors.assign(static_cast<std::size_t>(s.count) * 2 * g.dim, -1);
  std::array<int, 4> idx{0, 0, 0, 0};
  for (std::int64_t k = 0; k < s.count; ++k) {
    std::int64_t f = s.flat_of[static_cast<std::size_t>(k)];
    std::int64_t rem = f;
    for (int a = 0; a < g.dim; ++a) {
      idx[a] = static_cast<int>(rem % g.dims[a]);
      rem /= g.dims[a];
    }
    for (int a = 0; a < g.dim; ++a) {
      if (idx[a] > 0) {
        std::int32_t c = compact[static_cast<std::size_t>(f - stride[a])];
        s.neighbors[static_cast<std::size_t>(k) * 2 * g.dim + 2 * a] = c;
      }
      if (idx[a] + 1 < g.dims[a]) {
        std::int32_t c = compact[static_cast<std::size_t>(f + stride[a])];
        s.neighbors[static_cast<std::size_t>(k) * 2 * g.dim + 2 * a + 1] = c;
      }
    }
  }
  return s;
}

void apply(const Stencil& s, const std::vector<double>& u,
           std::vector<double>& out) {
  const int m = 2 * s.dim;
  const double diag = 2.0 * s.dim;
  for (std::int64_t k = 0; k < s.count; ++k) {
    double acc = diag * u[static_cast<std::size_t>(k)];
    const std::int32_t* nb = &s.neighbors[static_cast<std::size_t>(k) * m];
    for (int j = 0; j < m; ++j)
      if (nb[j] >= 0) acc -= u[static_cast<std::size_t>(nb[j])];
    out[static_cast<std::size_t>(k)] = acc * s.inv_h2;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Plain CG; A is symmetric positive definite.  Returns iterations used.
int cg_solve(const Stencil& s, const std::vector<double>& b,
             std::vector<double>& x, double rel_tol, int max_iter) {
  std::size_t n = b.size();
  std::vector<double> r(n), p(n), ap(n);
  apply(s, x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  p = r;
  double rr = dot(r, r);
  double b2 = dot(b, b);
  double stop = rel_tol * rel_tol * (b2 > 0 ? b2 : 1.0);
  int it = 0;
  while (rr > stop && it < max_iter) {
    apply(s, p, ap);
    double alpha = rr / dot(p, ap);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    double rr2 = dot(r, r);
    double beta = rr2 / rr;
    rr = rr2;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    ++it;
  }
  return it;
}

EigenPair solve_grid(const VoxelGrid& g, double tol,
                     const std::vector<double>* guess) {
  if (tol <= 0) throw InvalidParameter("eigen tolerance must be positive");
  Stencil s = build_stencil(g);
  std::size_t n = static_cast<std::size_t>(s.count);
  std::vector<double> v(n, 1.0);
  if (guess) {
    double norm2 = 0;
    for (std::size_t k = 0; k < n; ++k) {
      double val = (*guess)[static_cast<std::size_t>(s.flat_of[k])];
      v[k] = val;
      norm2 += val * val;
    }
    if (norm2 < 1e-300) v.assign(n, 1.0);
  }
  {
    double nv = std::sqrt(dot(v, v));
    for (auto& x : v) x /= nv;
  }

  std::vector<double> w(n), aw(n);
  const int max_outer = 200;
  const int max_inner = 40000;
  double lambda = 0, res = 0;
  double inner_tol = 0.05;
  int it = 0;
  for (it = 1; it <= max_outer; ++it) {
    w = v;  // warm start the inner solve with the current eigenvector
    cg_solve(s, v, w, inner_tol, max_inner);
    double nw = std::sqrt(dot(w, w));
    if (!(nw > 0)) throw SolverFailure("inverse iteration collapsed", 0);
    for (auto& x : w) x /= nw;
    apply(s, w, aw);
    lambda = dot(w, aw);
    if (!(lambda > 0)) throw SolverFailure("nonpositive Rayleigh quotient", lambda);
    double r2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = aw[i] - lambda * w[i];
      r2 += d * d;
    }
    res = std::sqrt(r2) / lambda;
    v = w;
    if (res <= tol) break;
    inner_tol = std::clamp(0.3 * res, std::min(0.1 * tol, 0.05), 0.05);
  }
  if (res > tol)
    throw SolverFailure("inverse power iteration did not converge", res);

  // keep the ground state positive
  double sum = 0;
  for (double x : v) sum += x;
  if (sum < 0)
    for (auto& x : v) x = -x;

  EigenPair out;
  out.info.lambda = lambda;
  out.info.h = g.h;
  out.info.iterations = it;
  out.info.residual = res;
  out.field.assign(static_cast<std::size_t>(g.cell_count()), 0.0);
  for (std::size_t k = 0; k < n; ++k)
    out.field[static_cast<std::size_t>(s.flat_of[k])] = v[k];
  return out;
}

// Nearest-cell injection of a coarse full-grid field onto a fine grid.
std::vector<double> prolong(const VoxelGrid& coarse,
                            const std::vector<double>& cf,
                            const VoxelGrid& fine) {
  std::vector<double> out(static_cast<std::size_t>(fine.cell_count()), 0.0);
  std::int64_t total = fine.cell_count();
  for (std::int64_t f = 0; f < total; ++f) {
    if (!fine.occupancy[static_cast<std::size_t>(f)]) continue;
    Vec x = fine.cell_center(f);
    std::array<int, 4> ci{0, 0, 0, 0};
    bool ok = true;
    for (int a = 0; a < coarse.dim; ++a) {
      int i = static_cast<int>(std::floor((x[a] - coarse.origin[a]) / coarse.h));
      if (i < 0 || i >= coarse.dims[a]) { ok = false; break; }
      ci[a] = i;
    }
    if (!ok) continue;
    std::int64_t cflat = coarse.flat_index(ci);
    if (coarse.occupancy[static_cast<std::size_t>(cflat)])
      out[static_cast<std::size_t>(f)] = cf[static_cast<std::size_t>(cflat)];
  }
  return out;
}

}  // namespace

EigenResult lowest_eigenvalue(const VoxelGrid& grid, double tol) {
  return solve_grid(grid, tol, nullptr).info;
}

EigenPair lowest_eigenpair(const VoxelGrid& grid, double tol) {
  return solve_grid(grid, tol, nullptr);
}

double rayleigh_quotient(const VoxelGrid& grid, const std::vector<double>& u) {
  if (static_cast<std::int64_t>(u.size()) != grid.cell_count())
    throw InvalidParameter("field length does not match the grid");
  Stencil s = build_stencil(grid);
  std::size_t n = static_cast<std::size_t>(s.count);
  std::vector<double> v(n), av(n);
  for (std::size_t k = 0; k < n; ++k)
    v[k] = u[static_cast<std::size_t>(s.flat_of[k])];
  double v2 = dot(v, v);
  if (!(v2 > 0)) throw InvalidParameter("test function vanishes on the grid");
  apply(s, v, av);
  return dot(v, av) / v2;
}

EigenResult bottom_eigenvalue(const DomainSpec& domain, const Box& bbox,
                              double h, double tol, bool extrapolate) {
  VoxelGrid fine = voxelize(domain, bbox, h);
  std::optional<EigenPair> coarse_pair;
  VoxelGrid coarse;
  if (extrapolate) {
    coarse = voxelize(domain, bbox, 2 * h);
    try {
      coarse_pair = solve_grid(coarse, tol, nullptr);
    } catch (const EmptyDomain&) {
      coarse_pair.reset();  // too thin at 2h; solve fine without a guide
    }
  }
  std::vector<double> guess;
  if (coarse_pair) guess = prolong(coarse, coarse_pair->field, fine);
  EigenPair fp = solve_grid(fine, tol, coarse_pair ? &guess : nullptr);
  EigenResult out = fp.info;
  if (coarse_pair)
    out.extrapolated = 2 * out.lambda - coarse_pair->info.lambda;
  return out;
}

EigenResult width_extrapolated_eigenvalue(const DomainSpec& domain,
                                          const Box& bbox, double widen_factor,
                                          double h, double tol) {
  if (!(widen_factor > 1))
    throw InvalidParameter("widen factor must exceed 1");
  EigenResult narrow = bottom_eigenvalue(domain, bbox, h, tol, true);
  Box wide = bbox;
  for (int a = 0; a < bbox.dim(); ++a) {
    double c = 0.5 * (bbox.lo[a] + bbox.hi[a]);
    wide.lo[a] = c + widen_factor * (bbox.lo[a] - c);
    wide.hi[a] = c + widen_factor * (bbox.hi[a] - c);
  }
  EigenResult wider = bottom_eigenvalue(domain, wide, h, tol, true);
  double s2 = widen_factor * widen_factor;
  double lam =
      narrow.value() - (narrow.value() - wider.value()) * s2 / (s2 - 1.0);
  EigenResult out;
  out.lambda = lam;
  out.extrapolated = lam;
  out.h = h;
  out.iterations = narrow.iterations + wider.iterations;
  out.residual = std::max(narrow.residual, wider.residual);
  return out;
}

TestFunctionReport trial_function_bound(const DomainSpec& domain,
                                        const Ball& ball, double gamma,
                                        double h) {
  if (!(ball.radius > 0)) throw InvalidParameter("ball radius must be positive");
  if (!(h > 0)) throw InvalidParameter("grid spacing must be positive");
  int n = domain.dimension();
  double kap = kappa(gamma, n);
  const double r = ball.radius;

  TestFunctionReport rep;
  rep.ball = ball;
  rep.kappa = kap;
  rep.cutoff_bound = 2.0 / (kap * r);

  CapParams cp;
  cp.h = h;
  rep.negligible_input = is_negligible(domain, ball, gamma, cp).negligible;

  // F: one-cell dilation of the closed-ball-minus-domain mask, padded so the
  // dilation has room at the grid edge.
  CompactMask clip = clip_ball_complement(domain, ball, h);
  CompactMask padded;
  padded.dim = clip.dim;
  padded.h = clip.h;
  padded.origin = clip.origin;
  for (int a = 0; a < clip.dim; ++a) {
    padded.origin[a] -= clip.h;
    padded.dims[a] = clip.dims[a] + 2;
  }
  padded.occupancy.assign(static_cast<std::size_t>(padded.cell_count()), false);
  {
    std::int64_t total = clip.cell_count();
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::int64_t f = 0; f < total; ++f) {
      if (clip.occupancy[static_cast<std::size_t>(f)]) {
        std::int64_t rem = f, pf = 0;
        for (int a = 0; a < clip.dim; ++a) {
          idx[a] = static_cast<int>(rem % clip.dims[a]) + 1;
          rem /= clip.dims[a];
        }
        for (int a = clip.dim - 1; a >= 0; --a) pf = pf * padded.dims[a] + idx[a];
        padded.occupancy[static_cast<std::size_t>(pf)] = true;
      }
    }
  }
  CompactMask F = dilate_one_cell(padded);

  Box ball_box;
  ball_box.lo = ball.center;
  ball_box.hi = ball.center;
  for (int a = 0; a < n; ++a) {
    ball_box.lo[a] -= r;
    ball_box.hi[a] += r;
  }

  // Equilibrium potential of F sampled on the ball region.
  PotentialField pot;
  bool have_potential = false;
  if (!F.empty()) {
    GridCapacityOptions opts;
    opts.field_region = ball_box;
    opts.keep_potential = true;
    opts.with_indicator = false;
    pot = capacity_grid(F, opts).potential;
    have_potential = true;
  }
  auto sample_potential = [&](const Vec& x) -> double {
    if (!have_potential) return 0.0;
    std::array<int, 4> idx{0, 0, 0, 0};
    for (int a = 0; a < pot.dim; ++a) {
      int i = static_cast<int>(std::floor((x[a] - pot.origin[a]) / pot.h));
      idx[a] = std::clamp(i, 0, pot.dims[a] - 1);
    }
    std::int64_t f = 0;
    for (int a = pot.dim - 1; a >= 0; --a) f = f * pot.dims[a] + idx[a];
    return std::clamp(pot.values[static_cast<std::size_t>(f)], 0.0, 1.0);
  };

  DomainSpec cap_region =
      DomainSpec::intersect({domain, DomainSpec::ball_at(ball.center, r)});
  VoxelGrid grid = voxelize(cap_region, ball_box, h);

  std::vector<double> u(static_cast<std::size_t>(grid.cell_count()), 0.0);
  double sup_factor = 0;
  bool any = false;
  std::int64_t total = grid.cell_count();
  for (std::int64_t f = 0; f < total; ++f) {
    if (!grid.occupancy[static_cast<std::size_t>(f)]) continue;
    Vec x = grid.cell_center(f);
    double t = norm(x - ball.center);
    double eta;
    if (t <= (1.0 - kap) * r)
      eta = 1.0;
    else if (t < r)
      eta = (r - t) / (kap * r);
    else
      continue;
    double factor = 1.0 - sample_potential(x);
    double val = eta * factor;
    if (val <= 0) continue;
    u[static_cast<std::size_t>(f)] = val;
    sup_factor = std::max(sup_factor, factor);
    any = true;
  }
  if (!any)
    throw DegenerateTestFunction("trial function vanishes on the whole grid");

  rep.rayleigh = rayleigh_quotient(grid, u);
  rep.potential_sup_check = sup_factor;
  return rep;
}

}  // namespace capdrum
