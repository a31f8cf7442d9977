#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "capdrum/capacity.hpp"
#include "capdrum/constants.hpp"
#include "capdrum/errors.hpp"

namespace capdrum {

namespace {

// radial profile of the fundamental solution, E(rho) = rho^{2-n}/((n-2) w_n)
double fundamental(double rho, int n, double omega_n) {
  return std::pow(rho, 2 - n) / ((n - 2) * omega_n);
}

struct Axis {
  std::vector<double> t;  // cell centers, ascending
  std::vector<double> d;  // center-to-center gaps, size m-1
  std::vector<double> w;  // dual cell widths, size m
  int core_begin = 0;     // first index of the uniform-h core
  long mask_i0 = 0;       // mask axis index of core_begin's cell
};

// Cell classification for the solve.
enum : uint8_t { kFree = 0, kMask = 1, kFar = 2 };

struct SolverGrid {
  int dim = 3;
  std::array<Axis, 4> axes;
  std::array<int, 4> dims{1, 1, 1, 1};
  std::array<std::int64_t, 4> stride{1, 1, 1, 1};
  std::int64_t total = 1;
  std::vector<uint8_t> state;
  std::vector<double> vol;    // dual volume per cell
  std::vector<double> ratio;  // per axis a: 1/(w_a[j] * d_a[j]) flattened
  std::array<std::vector<double>, 4> link_ratio;  // [a][j] for link j->j+1
  Vec center;                                     // mask centroid
  double sphere_radius = 0;                       // matched boundary radius
};

SolverGrid build_grid(const CompactMask& mask, const MaskStats& st,
                      const GridCapacityOptions& opts, double h) {
  SolverGrid g;
  g.dim = mask.dim;
  g.center = st.centroid;

  double hull = std::max(st.hull_radius, 2 * h);
  double outer = opts.outer_factor * hull;
  g.sphere_radius = outer;

  for (int a = 0; a < g.dim; ++a) {
    Axis& ax = g.axes[a];
    double pad = std::max(2 * h, 0.1 * hull);
    double core_lo = st.occupied_bbox.lo.x[a] - pad;
    double core_hi = st.occupied_bbox.hi.x[a] + pad;
    if (opts.field_region) {
      core_lo = std::min(core_lo, opts.field_region->lo.x[a]);
      core_hi = std::max(core_hi, opts.field_region->hi.x[a]);
    }
    // snap the uniform core onto the mask lattice
    double o = mask.origin.x[a];
    long i_lo = long(std::floor((core_lo - o) / h - 0.5));
    long i_hi = long(std::ceil((core_hi - o) / h - 0.5));
    std::vector<double> core;
    core.reserve(i_hi - i_lo + 1);
    for (long i = i_lo; i <= i_hi; ++i) core.push_back(o + (double(i) + 0.5) * h);

    double lo_limit = g.center.x[a] - outer;
    double hi_limit = g.center.x[a] + outer;

    std::vector<double> below;
    {
      double x = core.front(), step = h;
      while (x > lo_limit) {
        step *= opts.stretch_ratio;
        x -= step;
        below.push_back(x);
      }
    }
    std::vector<double> above;
    {
      double x = core.back(), step = h;
      while (x < hi_limit) {
        step *= opts.stretch_ratio;
        x += step;
        above.push_back(x);
      }
    }

    ax.t.assign(below.rbegin(), below.rend());
    ax.core_begin = int(ax.t.size());
    ax.mask_i0 = i_lo;
    ax.t.insert(ax.t.end(), core.begin(), core.end());
    ax.t.insert(ax.t.end(), above.begin(), above.end());

    int m = int(ax.t.size());
    if (m < 3) throw InvalidParameter("capacity grid degenerate along an axis");
    ax.d.resize(m - 1);
    for (int j = 0; j + 1 < m; ++j) ax.d[j] = ax.t[j + 1] - ax.t[j];
    ax.w.resize(m);
    ax.w[0] = ax.d[0];
    ax.w[m - 1] = ax.d[m - 2];
    for (int j = 1; j + 1 < m; ++j) ax.w[j] = 0.5 * (ax.t[j + 1] - ax.t[j - 1]);

    g.dims[a] = m;
  }

  g.total = 1;
  for (int a = 0; a < g.dim; ++a) {
    g.stride[a] = g.total;
    g.total *= g.dims[a];
  }
  if (g.total > cell_budget())
    throw ResourceLimit("capacity grid of " + std::to_string(g.total) +
                        " cells exceeds CAPDRUM_MAX_CELLS");

  // dual volumes and link ratios
  g.vol.assign(g.total, 1.0);
  {
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::int64_t f = 0; f < g.total; ++f) {
      double v = 1;
      for (int a = 0; a < g.dim; ++a) v *= g.axes[a].w[idx[a]];
      g.vol[f] = v;
      for (int a = 0; a < g.dim; ++a) {
        if (++idx[a] < g.dims[a]) break;
        idx[a] = 0;
      }
    }
  }
  for (int a = 0; a < g.dim; ++a) {
    const Axis& ax = g.axes[a];
    auto& lr = g.link_ratio[a];
    lr.resize(ax.d.size());
    for (size_t j = 0; j < ax.d.size(); ++j) lr[j] = 1.0 / (ax.w[j] * ax.d[j]);
  }

  // classification
  g.state.assign(g.total, kFree);
  double r2 = outer * outer;
  {
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::int64_t f = 0; f < g.total; ++f) {
      double dist2 = 0;
      bool ring = false;
      for (int a = 0; a < g.dim; ++a) {
        double dx = g.axes[a].t[idx[a]] - g.center.x[a];
        dist2 += dx * dx;
        ring = ring || idx[a] == 0 || idx[a] == g.dims[a] - 1;
      }
      if (dist2 >= r2 || ring) g.state[f] = kFar;
      for (int a = 0; a < g.dim; ++a) {
        if (++idx[a] < g.dims[a]) break;
        idx[a] = 0;
      }
    }
  }

  // mask cells override
  std::array<std::int64_t, 4> mstride{1, 1, 1, 1};
  std::int64_t mtotal = 1;
  for (int a = 0; a < mask.dim; ++a) {
    mstride[a] = mtotal;
    mtotal *= mask.dims[a];
  }
  std::array<int, 4> idx{0, 0, 0, 0};
  for (std::int64_t f = 0; f < mtotal; ++f) {
    if (mask.occupancy[f]) {
      std::int64_t sf = 0;
      bool in = true;
      for (int a = 0; a < mask.dim; ++a) {
        long jj = g.axes[a].core_begin + (idx[a] - g.axes[a].mask_i0);
        if (jj < 0 || jj >= g.dims[a]) {
          in = false;
          break;
        }
        sf += jj * g.stride[a];
      }
      if (in) g.state[sf] = kMask;
    }
    for (int a = 0; a < mask.dim; ++a) {
      if (++idx[a] < mask.dims[a]) break;
      idx[a] = 0;
    }
  }
  return g;
}

// A u with matrix entries from the tensor finite-volume energy
//   E(u) = 1/2 sum_links cond * (du)^2,
// cond = (prod_{b != a} w_b) / d_a = vol / (w_a * d_a).
void apply_operator(const SolverGrid& g, const std::vector<double>& u,
                    std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  std::array<int, 4> idx{0, 0, 0, 0};
  for (std::int64_t f = 0; f < g.total; ++f) {
    for (int a = 0; a < g.dim; ++a) {
      int j = idx[a];
      if (j + 1 < g.dims[a]) {
        std::int64_t f2 = f + g.stride[a];
        double cond = g.vol[f] * g.link_ratio[a][j];
        double diff = u[f] - u[f2];
        out[f] += cond * diff;
        out[f2] -= cond * diff;
      }
    }
    for (int a = 0; a < g.dim; ++a) {
      if (++idx[a] < g.dims[a]) break;
      idx[a] = 0;
    }
  }
}

}  // namespace

GridCapacityResult capacity_grid(const CompactMask& mask, double outer_factor,
                                 double h, double tol) {
  GridCapacityOptions opts;
  opts.outer_factor = outer_factor;
  opts.tol = tol;
  CompactMask m = mask;
  if (std::abs(h - mask.h) > 1e-12 * mask.h)
    throw InvalidParameter("requested spacing differs from the mask spacing");
  return capacity_grid(m, opts);
}

namespace {

struct SolveOutcome {
  double energy = 0;
  double flux = 0;
  int iterations = 0;
  double residual = 0;
};

// PCG on the free cells; fixed cells already hold their boundary values in u.
SolveOutcome solve_free(const SolverGrid& g, std::vector<double>& u,
                        double tol, int max_iter) {
  std::int64_t N = g.total;
  std::vector<double> r(N, 0.0), z(N, 0.0), p(N, 0.0), Ap(N, 0.0);
  std::vector<double> diag(N, 0.0);

  // diagonal and initial residual r = -(A u) on free cells
  apply_operator(g, u, Ap);
  {
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::int64_t f = 0; f < N; ++f) {
      for (int a = 0; a < g.dim; ++a) {
        int j = idx[a];
        if (j + 1 < g.dims[a]) {
          double cond = g.vol[f] * g.link_ratio[a][j];
          diag[f] += cond;
          diag[f + g.stride[a]] += cond;
        }
      }
      for (int a = 0; a < g.dim; ++a) {
        if (++idx[a] < g.dims[a]) break;
        idx[a] = 0;
      }
    }
  }
  double ref = 0;
  for (std::int64_t f = 0; f < N; ++f) {
    if (g.state[f] == kFree) {
      r[f] = -Ap[f];
      ref += r[f] * r[f];
    }
  }
  ref = std::sqrt(ref);
  SolveOutcome out;
  if (ref == 0) return out;

  double rz = 0;
  for (std::int64_t f = 0; f < N; ++f) {
    if (g.state[f] == kFree) {
      z[f] = r[f] / diag[f];
      p[f] = z[f];
      rz += r[f] * z[f];
    }
  }

  double res = ref;
  int it = 0;
  for (; it < max_iter && res > tol * ref; ++it) {
    apply_operator(g, p, Ap);
    double pAp = 0;
    for (std::int64_t f = 0; f < N; ++f)
      if (g.state[f] == kFree) pAp += p[f] * Ap[f];
    if (pAp <= 0) break;
    double alpha = rz / pAp;
    double rr = 0;
    for (std::int64_t f = 0; f < N; ++f) {
      if (g.state[f] == kFree) {
        u[f] += alpha * p[f];
        r[f] -= alpha * Ap[f];
        rr += r[f] * r[f];
      }
    }
    res = std::sqrt(rr);
    double rz_new = 0;
    for (std::int64_t f = 0; f < N; ++f) {
      if (g.state[f] == kFree) {
        z[f] = r[f] / diag[f];
        rz_new += r[f] * z[f];
      }
    }
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::int64_t f = 0; f < N; ++f)
      if (g.state[f] == kFree) p[f] = z[f] + beta * p[f];
  }
  out.iterations = it;
  out.residual = res / ref;
  if (res > tol * ref)
    throw SolverFailure("capacity solve did not reach tolerance", out.residual);

  // energy over links touching at least one non-far cell, and mask flux
  double E = 0, flux = 0;
  std::array<int, 4> idx{0, 0, 0, 0};
  for (std::int64_t f = 0; f < N; ++f) {
    for (int a = 0; a < g.dim; ++a) {
      int j = idx[a];
      if (j + 1 < g.dims[a]) {
        std::int64_t f2 = f + g.stride[a];
        if (g.state[f] == kFar && g.state[f2] == kFar) continue;
        double cond = g.vol[f] * g.link_ratio[a][j];
        double diff = u[f] - u[f2];
        E += cond * diff * diff;
        if ((g.state[f] == kMask) != (g.state[f2] == kMask))
          flux += g.state[f] == kMask ? cond * diff : -cond * diff;
      }
    }
    for (int a = 0; a < g.dim; ++a) {
      if (++idx[a] < g.dims[a]) break;
      idx[a] = 0;
    }
  }
  out.energy = E;
  out.flux = flux;
  return out;
}

double solve_capacity(const CompactMask& mask, const MaskStats& st,
                      const GridCapacityOptions& opts, double h,
                      PotentialField* field, double* flux_out) {
  int n = mask.dim;
  double omega = sphere_area(n);

  SolverGrid g = build_grid(mask, st, opts, h);
  std::vector<double> u(g.total, 0.0);
  for (std::int64_t f = 0; f < g.total; ++f)
    if (g.state[f] == kMask) u[f] = 1.0;

  double cap = 0;
  SolveOutcome oc;
  for (int pass = 0; pass <= opts.matched_passes; ++pass) {
    double alpha = pass == 0 ? 0.0 : cap;
    // boundary values on far cells
    {
      std::array<int, 4> idx{0, 0, 0, 0};
      for (std::int64_t f = 0; f < g.total; ++f) {
        if (g.state[f] == kFar) {
          if (alpha == 0) {
            u[f] = 0;
          } else {
            double dist2 = 0;
            for (int a = 0; a < g.dim; ++a) {
              double dx = g.axes[a].t[idx[a]] - g.center.x[a];
              dist2 += dx * dx;
            }
            double rho = std::max(std::sqrt(dist2), 0.5 * g.sphere_radius);
            u[f] = alpha * fundamental(rho, n, omega);
          }
        }
        for (int a = 0; a < g.dim; ++a) {
          if (++idx[a] < g.dims[a]) break;
          idx[a] = 0;
        }
      }
    }
    oc = solve_free(g, u, opts.tol, opts.max_iterations);
    cap = oc.energy + alpha * alpha * fundamental(g.sphere_radius, n, omega);
  }

  // maximum-principle check on the solution
  double lo = 0, hi = 0;
  for (std::int64_t f = 0; f < g.total; ++f) {
    lo = std::min(lo, u[f]);
    hi = std::max(hi, u[f]);
  }
  if (lo < -1e-6 || hi > 1 + 1e-6)
    throw SolverFailure("potential violates the maximum principle", lo < -1e-6 ? lo : hi - 1);

  if (field) {
    field->dim = g.dim;
    field->h = h;
    std::int64_t total = 1;
    for (int a = 0; a < g.dim; ++a) {
      const Axis& ax = g.axes[a];
      int m_core = 0;
      // core runs from core_begin until spacing stops being h
      int jend = ax.core_begin;
      while (jend + 1 < int(ax.t.size()) &&
             std::abs(ax.d[jend] - h) < 1e-9 * h)
        ++jend;
      m_core = jend - ax.core_begin + 1;
      field->origin.x[a] = ax.t[ax.core_begin] - 0.5 * h;
      field->dims[a] = m_core;
      total *= m_core;
    }
    field->origin.dim = g.dim;
    field->values.assign(total, 0.0);
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::int64_t f = 0; f < total; ++f) {
      std::int64_t sf = 0;
      for (int a = 0; a < g.dim; ++a)
        sf += std::int64_t(g.axes[a].core_begin + idx[a]) * g.stride[a];
      field->values[f] = std::clamp(u[sf], 0.0, 1.0);
      for (int a = 0; a < g.dim; ++a) {
        if (++idx[a] < field->dims[a]) break;
        idx[a] = 0;
      }
    }
  }
  if (flux_out) *flux_out = oc.flux;
  return cap;
}

}  // namespace

GridCapacityResult capacity_grid(const CompactMask& mask,
                                 const GridCapacityOptions& opts) {
  if (mask.dim < 3)
    throw InvalidDimension("capacity needs n >= 3");
  if (!(opts.outer_factor >= 4))
    throw InvalidParameter("outer_factor must be >= 4");

  GridCapacityResult res;
  res.estimate.method = CapacityMethod::grid;
  res.estimate.resolution = mask.h;

  MaskStats st = mask_stats(mask);
  if (st.count == 0) {
    res.potential.dim = mask.dim;
    res.potential.h = mask.h;
    res.potential.origin = mask.origin;
    res.potential.dims = {1, 1, 1, 1};
    res.potential.values.assign(1, 0.0);
    return res;
  }
  res.estimate.single_cell_warning = st.count == 1;

  res.estimate.value =
      solve_capacity(mask, st, opts, mask.h,
                     opts.keep_potential ? &res.potential : nullptr,
                     &res.flux_diagnostic);

  if (opts.with_indicator) {
    CompactMask coarse = coarsen(mask);
    MaskStats cst = mask_stats(coarse);
    GridCapacityOptions copts = opts;
    copts.with_indicator = false;
    copts.keep_potential = false;
    double cap2h = solve_capacity(coarse, cst, copts, coarse.h, nullptr, nullptr);
    res.estimate.error_indicator = std::abs(res.estimate.value - cap2h);
  }
  return res;
}

}  // namespace capdrum
