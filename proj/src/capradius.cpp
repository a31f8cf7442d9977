#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "capdrum/capacity.hpp"
#include "capdrum/capradius.hpp"
#include "capdrum/constants.hpp"
#include "capdrum/errors.hpp"
#include "capdrum/geometry.hpp"

namespace capdrum {

namespace {

// Screens decide a verdict without a solve only when the bound clears gamma
// by this relative margin; anything closer goes to the full solver.
constexpr double kScreenMargin = 0.05;
// Continuum-to-voxel slack for the O(1) candidate pre-filter: a candidate is
// skipped only when the isoperimetric screen would reject it even if the
// voxel defect count undershot the continuum volume by this factor.
constexpr double kPruneSlack = 0.75;

void check_gamma_range(double gamma) {
  if (!(gamma > 0) || !(gamma < 1))
    throw InvalidParameter("gamma must lie strictly between 0 and 1");
}

GridCapacityOptions solver_options(const CapParams& cap) {
  GridCapacityOptions o;
  o.outer_factor = cap.outer_factor;
  o.tol = cap.tol;
  o.matched_passes = cap.matched_passes;
  o.with_indicator = true;
  o.keep_potential = false;
  return o;
}

// Everything known about one defect mask before/after the capacity solve.
struct MaskEvidence {
  bool empty = true;
  double cap_ball = 0;
  double measure = 0;
  double lower_rel = 0;  // isoperimetric lower bound / cap_ball
  double upper_rel = 0;  // circumscribed-ball upper bound / cap_ball
  std::optional<CapacityEstimate> exact;
};

// Screen bounds from cell count and spread about the ball center; both are
// monotone-rigorous for the voxel mask itself.
MaskEvidence gather_evidence(std::int64_t count, double max_center_dist,
                             const Ball& ball, double h, int n) {
  MaskEvidence ev;
  ev.cap_ball = ball_capacity(n, ball.radius);
  if (count == 0) return ev;
  ev.empty = false;
  ev.measure = double(count) * std::pow(h, n);
  double a_n = isoperimetric_constant(n);
  double cap_low = std::pow(ev.measure / a_n, double(n - 2) / n);
  double hull = max_center_dist + 0.5 * std::sqrt(double(n)) * h;
  double cap_up = ball_capacity(n, hull);
  ev.lower_rel = cap_low / ev.cap_ball;
  ev.upper_rel = cap_up / ev.cap_ball;
  return ev;
}

bool screens_decide(const MaskEvidence& ev, double gamma) {
  if (ev.empty) return true;
  if (ev.exact) return true;
  if (ev.upper_rel <= gamma * (1.0 - kScreenMargin)) return true;
  if (ev.lower_rel >= gamma * (1.0 + kScreenMargin)) return true;
  return false;
}

NegligibilityVerdict decide(const MaskEvidence& ev, const Ball& ball,
                            double gamma) {
  NegligibilityVerdict v;
  v.ball = ball;
  v.cap_ball = ev.cap_ball;
  v.gamma = gamma;
  if (ev.empty) {
    v.cap_diff.method = CapacityMethod::analytic;
    v.ratio = 0;
    v.negligible = true;
    return v;
  }
  if (ev.exact) {
    v.cap_diff = *ev.exact;
    v.ratio = ev.exact->value / ev.cap_ball;
    v.negligible = v.ratio <= gamma;
    double rel_ind = ev.exact->error_indicator / ev.cap_ball;
    v.borderline = std::abs(v.ratio - gamma) <= rel_ind;
    return v;
  }
  // screen verdicts: report the deciding bound as the ratio
  v.cap_diff.method = CapacityMethod::analytic;
  if (ev.upper_rel <= gamma * (1.0 - kScreenMargin)) {
    v.ratio = ev.upper_rel;
    v.cap_diff.value = ev.upper_rel * ev.cap_ball;
    v.negligible = true;
  } else {
    v.ratio = ev.lower_rel;
    v.cap_diff.value = ev.lower_rel * ev.cap_ball;
    v.negligible = v.ratio <= gamma;  // false by the screen condition
  }
  return v;
}

// Memoized open-membership sampler on a fixed lattice; cells outside the
// lattice fall back to direct evaluation.  Cells are additionally grouped
// into kBlock^dim blocks classified as all-inside / all-outside / mixed, so
// candidate scans touch individual cells only near boundaries.
struct LazyOmega {
  static constexpr int kBlock = 4;
  static constexpr std::uint8_t kUnknown = 0, kAllIn = 1, kNoneIn = 2,
                                kMixed = 3;

  const DomainSpec* spec = nullptr;
  Vec origin;
  double h = 1;
  std::array<int, 4> dims{1, 1, 1, 1};
  std::array<int, 4> bdims{1, 1, 1, 1};
  int dim = 3;
  std::vector<std::uint8_t> state;   // per cell: unknown / in / out
  std::vector<std::uint8_t> bstate;  // per block

  Vec center(const std::array<int, 4>& gi) const {
    Vec p = Vec::zeros(dim);
    for (int a = 0; a < dim; ++a) p[a] = origin[a] + (gi[a] + 0.5) * h;
    return p;
  }

  bool inside(const std::array<int, 4>& gi) {
    for (int a = 0; a < dim; ++a)
      if (gi[a] < 0 || gi[a] >= dims[a])
        return spec->contains(center(gi), Membership::open);
    std::int64_t f = 0;
    for (int a = dim - 1; a >= 0; --a) f = f * dims[a] + gi[a];
    std::uint8_t& s = state[static_cast<std::size_t>(f)];
    if (s == 0) s = spec->contains(center(gi), Membership::open) ? 1 : 2;
    return s == 1;
  }

  std::uint8_t block_state(const std::array<int, 4>& bi) {
    std::int64_t bf = 0;
    for (int a = dim - 1; a >= 0; --a) bf = bf * bdims[a] + bi[a];
    std::uint8_t& s = bstate[static_cast<std::size_t>(bf)];
    if (s != kUnknown) return s;
    bool any_in = false, any_out = false;
    std::array<int, 4> lo{0, 0, 0, 0}, hi{0, 0, 0, 0}, it{0, 0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      lo[a] = bi[a] * kBlock;
      hi[a] = std::min(dims[a], lo[a] + kBlock) - 1;
      it[a] = lo[a];
    }
    while (true) {
      if (inside(it))
        any_in = true;
      else
        any_out = true;
      if (any_in && any_out) break;
      int a = 0;
      while (a < dim && ++it[a] > hi[a]) {
        it[a] = lo[a];
        ++a;
      }
      if (a == dim) break;
    }
    s = any_in ? (any_out ? kMixed : kAllIn) : kNoneIn;
    return s;
  }
};

LazyOmega make_sampler(const DomainSpec& spec, const Box& bbox, double r_reach,
                       const CapParams& cap) {
  LazyOmega s;
  s.spec = &spec;
  s.dim = bbox.dim();
  s.h = cap.h;
  std::int64_t total = 1, btotal = 1;
  for (int a = 0; a < s.dim; ++a) {
    double lo = bbox.lo[a] - r_reach - 2 * cap.h;
    double hi = bbox.hi[a] + r_reach + 2 * cap.h;
    s.origin[a] = lo;
    s.dims[a] = std::max(1, static_cast<int>(std::ceil((hi - lo) / cap.h)));
    s.bdims[a] = (s.dims[a] + LazyOmega::kBlock - 1) / LazyOmega::kBlock;
    total *= s.dims[a];
    btotal *= s.bdims[a];
  }
  if (total > cell_budget())
    throw ResourceLimit("radius search lattice exceeds the cell budget");
  s.state.assign(static_cast<std::size_t>(total), 0);
  s.bstate.assign(static_cast<std::size_t>(btotal), 0);
  return s;
}

// Defect mask of one candidate ball on the sampler lattice.  First pass
// yields screen evidence only; the mask itself is materialized on demand.
struct Candidate {
  Ball ball;
  std::array<int, 4> i_lo{0, 0, 0, 0};
  std::array<int, 4> ext{1, 1, 1, 1};
  std::int64_t count = 0;
  double max_center_dist = 0;
};

int floor_div_block(int i) {
  constexpr int k = LazyOmega::kBlock;
  return i >= 0 ? i / k : -((-i + k - 1) / k);
}

Candidate scan_candidate(LazyOmega& omega, const Ball& ball) {
  Candidate c;
  c.ball = ball;
  const int dim = omega.dim;
  const double h = omega.h;
  const double r = ball.radius;
  const double r2 = r * r;
  std::array<int, 4> b_lo{0, 0, 0, 0}, b_hi{0, 0, 0, 0}, bi{0, 0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    double lo = (ball.center[a] - r - omega.origin[a]) / h - 0.5;
    double hi = (ball.center[a] + r - omega.origin[a]) / h - 0.5;
    c.i_lo[a] = static_cast<int>(std::ceil(lo - 1e-12));
    int i_hi = static_cast<int>(std::floor(hi + 1e-12));
    c.ext[a] = std::max(1, i_hi - c.i_lo[a] + 1);
    b_lo[a] = floor_div_block(c.i_lo[a]);
    b_hi[a] = floor_div_block(c.i_lo[a] + c.ext[a] - 1);
    bi[a] = b_lo[a];
  }
  double best2 = 0;
  while (true) {
    // cell subrange of this block clipped to the candidate range
    std::array<int, 4> sub_lo{0, 0, 0, 0}, sub_hi{0, 0, 0, 0};
    bool sub_in_grid = true;
    double dmin2 = 0, dmax2 = 0;
    for (int a = 0; a < dim; ++a) {
      sub_lo[a] = std::max(c.i_lo[a], bi[a] * LazyOmega::kBlock);
      sub_hi[a] = std::min(c.i_lo[a] + c.ext[a] - 1,
                           bi[a] * LazyOmega::kBlock + LazyOmega::kBlock - 1);
      if (sub_lo[a] < 0 || sub_hi[a] >= omega.dims[a]) sub_in_grid = false;
      double e_lo = omega.origin[a] + (sub_lo[a] + 0.5) * h - ball.center[a];
      double e_hi = omega.origin[a] + (sub_hi[a] + 0.5) * h - ball.center[a];
      double amin = (e_lo <= 0 && e_hi >= 0)
                        ? 0
                        : std::min(std::abs(e_lo), std::abs(e_hi));
      double amax = std::max(std::abs(e_lo), std::abs(e_hi));
      dmin2 += amin * amin;
      dmax2 += amax * amax;
    }
    bool next = false;
    if (dmin2 > r2) next = true;  // no subrange cell lies in the ball
    if (!next) {
      bool all_in_ball = dmax2 <= r2;
      std::uint8_t st = LazyOmega::kMixed;
      if (sub_in_grid) st = omega.block_state(bi);
      if (st == LazyOmega::kAllIn) {
        next = true;  // whole block inside the domain: no defect here
      } else if (st == LazyOmega::kNoneIn && all_in_ball) {
        std::int64_t cnt = 1;
        for (int a = 0; a < dim; ++a) cnt *= sub_hi[a] - sub_lo[a] + 1;
        c.count += cnt;
        best2 = std::max(best2, dmax2);
        next = true;
      } else {
        std::array<int, 4> it = sub_lo;
        while (true) {
          double d2 = 0;
          for (int a = 0; a < dim; ++a) {
            double e = omega.origin[a] + (it[a] + 0.5) * h - ball.center[a];
            d2 += e * e;
          }
          if (d2 <= r2) {
            bool defect = st == LazyOmega::kNoneIn ? true : !omega.inside(it);
            if (defect) {
              ++c.count;
              best2 = std::max(best2, d2);
            }
          }
          int a = 0;
          while (a < dim && ++it[a] > sub_hi[a]) {
            it[a] = sub_lo[a];
            ++a;
          }
          if (a == dim) break;
        }
        next = true;
      }
    }
    (void)next;
    int a = 0;
    while (a < dim && ++bi[a] > b_hi[a]) {
      bi[a] = b_lo[a];
      ++a;
    }
    if (a == dim) break;
  }
  c.max_center_dist = std::sqrt(best2);
  return c;
}

CompactMask materialize(LazyOmega& omega, const Candidate& c) {
  CompactMask m;
  m.dim = omega.dim;
  m.h = omega.h;
  m.dims = {1, 1, 1, 1};
  for (int a = 0; a < omega.dim; ++a) {
    m.origin[a] = omega.origin[a] + c.i_lo[a] * omega.h;
    m.dims[a] = c.ext[a];
  }
  m.occupancy.assign(static_cast<std::size_t>(m.cell_count()), false);
  const double r2 = c.ball.radius * c.ball.radius;
  std::array<int, 4> it{0, 0, 0, 0};
  std::int64_t f = 0;
  while (true) {
    std::array<int, 4> gi{0, 0, 0, 0};
    double d2 = 0;
    for (int a = 0; a < omega.dim; ++a) {
      gi[a] = c.i_lo[a] + it[a];
      double e = omega.origin[a] + (gi[a] + 0.5) * omega.h - c.ball.center[a];
      d2 += e * e;
    }
    if (d2 <= r2 && !omega.inside(gi))
      m.occupancy[static_cast<std::size_t>(f)] = true;
    ++f;
    int a = 0;
    while (a < omega.dim && ++it[a] >= c.ext[a]) {
      it[a] = 0;
      ++a;
    }
    if (a == omega.dim) break;
  }
  return m;
}

// Any free cell the defect seals off from the block boundary carries
// discrete potential 1, so the capacity carrier is defect plus sealed
// pockets and the isoperimetric lower bound may use their joint volume.
// This is what rejects thin closed shells (tiny volume, near-full-ball
// capacity) without a solve.
void improve_with_enclosure(MaskEvidence& ev, const CompactMask& mask) {
  if (ev.empty) return;
  const int dim = mask.dim;
  const std::int64_t total = mask.cell_count();
  std::array<std::int64_t, 4> stride{1, 1, 1, 1};
  for (int a = 1; a < dim; ++a) stride[a] = stride[a - 1] * mask.dims[a - 1];
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(total), 0);
  std::vector<std::int64_t> queue;
  queue.reserve(256);
  // seed: free cells on the block boundary
  std::array<int, 4> it{0, 0, 0, 0};
  for (std::int64_t f = 0; f < total; ++f) {
    bool edge = false;
    for (int a = 0; a < dim; ++a)
      if (it[a] == 0 || it[a] + 1 == mask.dims[a]) edge = true;
    if (edge && !mask.occupancy[static_cast<std::size_t>(f)]) {
      seen[static_cast<std::size_t>(f)] = 1;
      queue.push_back(f);
    }
    for (int a = 0; a < dim; ++a) {
      if (++it[a] < mask.dims[a]) break;
      it[a] = 0;
    }
  }
  while (!queue.empty()) {
    std::int64_t f = queue.back();
    queue.pop_back();
    std::int64_t rem = f;
    std::array<int, 4> gi{0, 0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      gi[a] = static_cast<int>(rem % mask.dims[a]);
      rem /= mask.dims[a];
    }
    for (int a = 0; a < dim; ++a) {
      for (int s = -1; s <= 1; s += 2) {
        int j = gi[a] + s;
        if (j < 0 || j >= mask.dims[a]) continue;
        std::int64_t nf = f + s * stride[a];
        if (seen[static_cast<std::size_t>(nf)] ||
            mask.occupancy[static_cast<std::size_t>(nf)])
          continue;
        seen[static_cast<std::size_t>(nf)] = 1;
        queue.push_back(nf);
      }
    }
  }
  std::int64_t sealed = 0;
  for (std::int64_t f = 0; f < total; ++f)
    if (!mask.occupancy[static_cast<std::size_t>(f)] &&
        !seen[static_cast<std::size_t>(f)])
      ++sealed;
  if (sealed == 0) return;
  double mes = ev.measure + double(sealed) * std::pow(mask.h, dim);
  double cap_low =
      std::pow(mes / isoperimetric_constant(dim), double(dim - 2) / dim);
  ev.lower_rel = std::max(ev.lower_rel, cap_low / ev.cap_ball);
}

// Evidence for one candidate, solving only when the screens cannot decide
// every requested gamma (and the caller still allows a solve).
MaskEvidence candidate_evidence(LazyOmega& omega, const Ball& ball,
                                const std::vector<double>& gammas,
                                const CapParams& cap, bool allow_exact = true,
                                bool* solved = nullptr) {
  Candidate c = scan_candidate(omega, ball);
  MaskEvidence ev =
      gather_evidence(c.count, c.max_center_dist, ball, omega.h, omega.dim);
  auto need_exact = [&] {
    for (double g : gammas)
      if (!screens_decide(ev, g)) return true;
    return false;
  };
  if (!need_exact()) return ev;
  CompactMask mask = materialize(omega, c);
  improve_with_enclosure(ev, mask);
  if (need_exact() && allow_exact) {
    ev.exact = capacity_grid(mask, solver_options(cap)).estimate;
    if (solved) *solved = true;
  }
  return ev;
}

// Candidate passes for the search only when gamma clears the ratio by at
// least twice the capacity error indicator: the witness then stays
// negligible even if the estimate is off by a full indicator, and the
// leftover margin absorbs the exposure in the bounds report.
bool passes(const NegligibilityVerdict& v) {
  if (!v.negligible) return false;
  double rel_ind =
      v.cap_ball > 0 ? v.cap_diff.error_indicator / v.cap_ball : 0.0;
  return v.gamma - v.ratio >= 2.0 * rel_ind;
}

// Standalone verdict for one ball on a fresh sampler at the given spacing.
NegligibilityVerdict verdict_at_h(const DomainSpec& domain, const Ball& b,
                                  double gamma, CapParams cap, double h) {
  cap.h = h;
  Box point_box;
  point_box.lo = b.center;
  point_box.hi = b.center;
  LazyOmega po = make_sampler(domain, point_box, b.radius, cap);
  MaskEvidence ev = candidate_evidence(po, b, {gamma}, cap);
  return decide(ev, b, gamma);
}

// Doubling probes run far beyond the search lattice; they get their own
// sampler with spacing scaled to the probe radius, keeping the heuristic
// cheap at any probe size.
NegligibilityVerdict probe_verdict_at(const DomainSpec& domain, const Ball& pb,
                                      double gamma, const CapParams& cap) {
  return verdict_at_h(domain, pb, gamma, cap,
                      std::max(cap.h, pb.radius / 32.0));
}

// O(1) rejection of candidates whose ball sticks far enough out of the
// domain's bounding box that the isoperimetric screen must fail: the defect
// continuum volume is at least vol(ball) minus the box overlap of the ball's
// own bounding box.  Only a speed filter; near-threshold candidates fall
// through to the full evidence path.
struct PreFilter {
  std::optional<Box> dombox;
  int dim = 3;
  double h = 1;
  double unit_vol = 0;
  double a_n = 0;

  PreFilter(const DomainSpec& domain, int dimension, double spacing)
      : dombox(domain.bounding_box()),
        dim(dimension),
        h(spacing),
        unit_vol(sphere_area(dimension) / dimension),
        a_n(isoperimetric_constant(dimension)) {}

  // true: the ball certainly fails negligibility at every gamma <= gmax
  bool rejects(const Ball& b, double gmax) const {
    if (!dombox || b.radius < 6 * h) return false;
    const double r = b.radius;
    double overlap = 1;
    for (int a = 0; a < dim; ++a)
      overlap *= std::max(0.0, std::min(b.center[a] + r, dombox->hi[a]) -
                                   std::max(b.center[a] - r, dombox->lo[a]));
    double defect = unit_vol * std::pow(r, dim) - overlap;
    if (defect <= 0) return false;
    double cap_low = std::pow(kPruneSlack * defect / a_n, double(dim - 2) / dim);
    return cap_low >=
           gmax * (1.0 + 2 * kScreenMargin) * ball_capacity(dim, r);
  }

  // measure variant: voxel defect ratio certainly exceeds alpha
  bool rejects_measure(const Ball& b, double alpha) const {
    if (!dombox || b.radius < 6 * h) return false;
    const double r = b.radius;
    double overlap = 1;
    for (int a = 0; a < dim; ++a)
      overlap *= std::max(0.0, std::min(b.center[a] + r, dombox->hi[a]) -
                                   std::max(b.center[a] - r, dombox->lo[a]));
    double vol = unit_vol * std::pow(r, dim);
    return kPruneSlack * (vol - overlap) > alpha * vol;
  }
};

std::vector<Vec> center_lattice(const Box& bbox, double spacing, double reach,
                                int dim) {
  std::array<std::vector<double>, 4> lines;
  for (int a = 0; a < dim; ++a) {
    double c0 = 0.5 * (bbox.lo[a] + bbox.hi[a]);
    int k_lo = static_cast<int>(std::ceil((bbox.lo[a] - reach - c0) / spacing - 1e-12));
    int k_hi = static_cast<int>(std::floor((bbox.hi[a] + reach - c0) / spacing + 1e-12));
    if (k_hi < k_lo) k_lo = k_hi = 0;
    for (int k = k_lo; k <= k_hi; ++k) lines[a].push_back(c0 + k * spacing);
  }
  std::vector<Vec> out;
  std::array<std::size_t, 4> it{0, 0, 0, 0};
  while (true) {
    Vec p = Vec::zeros(dim);
    for (int a = 0; a < dim; ++a) p[a] = lines[a][it[a]];
    out.push_back(p);
    int a = 0;
    while (a < dim && ++it[a] >= lines[a].size()) {
      it[a] = 0;
      ++a;
    }
    if (a == dim) break;
  }
  // scan inside-out: witnesses tend to sit centrally, and the per-radius
  // scan stops at the first pass
  Vec c0 = Vec::zeros(dim);
  for (int a = 0; a < dim; ++a) c0[a] = 0.5 * (bbox.lo[a] + bbox.hi[a]);
  std::sort(out.begin(), out.end(), [&](const Vec& p, const Vec& q) {
    double dp = dot(p - c0, p - c0), dq = dot(q - c0, q - c0);
    if (dp != dq) return dp < dq;
    for (int a = 0; a < dim; ++a)
      if (p[a] != q[a]) return p[a] < q[a];
    return false;
  });
  return out;
}

void validate_search(const SearchParams& search, int dim) {
  if (search.radius_grid.empty())
    throw InvalidParameter("radius grid must not be empty");
  double prev = 0;
  for (double r : search.radius_grid) {
    if (!(r > prev))
      throw InvalidParameter("radius grid must be positive and ascending");
    prev = r;
  }
  if (!(search.cap.h > 0))
    throw InvalidParameter("grid spacing must be positive");
  for (int a = 0; a < dim; ++a)
    if (!(search.bbox.lo[a] <= search.bbox.hi[a]))
      throw InvalidParameter("search box corners are not ordered");
}

double default_spacing(const SearchParams& search) {
  if (search.center_spacing > 0) return search.center_spacing;
  const auto& g = search.radius_grid;
  if (g.size() > 1) return g[1] - g[0];
  return 0.5 * g[0];
}

// Generic scan shared by the capacitary and measure searches: accept is
// called per (candidate ball) and returns pass/fail per tracked slot, with
// slot semantics supplied by the caller (gammas or the single alpha).
struct SlotState {
  double best_radius = -1;
  std::optional<Ball> witness;
  std::optional<NegligibilityVerdict> witness_verdict;
  int best_index = -1;  // index into the radius grid
};

RadiusResult assemble(const SearchParams& search, double spacing,
                      RadiusKind kind, const SlotState& st, double refined,
                      double bracket, bool truncation,
                      const std::optional<Ball>& top_witness,
                      const std::optional<NegligibilityVerdict>& top_verdict) {
  RadiusResult out;
  out.kind = kind;
  out.center_spacing = spacing;
  out.radius_grid = search.radius_grid;
  out.radius_step = bracket;
  out.truncation_warning = truncation;
  if (truncation) {
    out.status = RadiusStatus::finite;
    out.radius = refined;
    out.witness = top_witness;
    out.witness_verdict = top_verdict;
    return out;
  }
  if (st.best_radius < 0) {
    out.status = RadiusStatus::zero;
    out.radius = 0;
    return out;
  }
  out.status = RadiusStatus::finite;
  out.radius = refined;
  out.witness = st.witness;
  if (out.witness) out.witness->radius = refined;
  out.witness_verdict = st.witness_verdict;
  return out;
}

}  // namespace

std::vector<double> linear_radius_grid(double r_min, double r_max, int steps) {
  if (!(r_min > 0) || !(r_max >= r_min))
    throw InvalidParameter("radius range must satisfy 0 < r_min <= r_max");
  if (steps < 1) throw InvalidParameter("radius grid needs at least one step");
  std::vector<double> out;
  if (steps == 1) {
    out.push_back(r_min);
    return out;
  }
  double d = (r_max - r_min) / (steps - 1);
  for (int k = 0; k < steps; ++k) out.push_back(r_min + k * d);
  return out;
}

NegligibilityVerdict is_negligible(const DomainSpec& domain, const Ball& ball,
                                   double gamma, const CapParams& cap) {
  check_gamma_range(gamma);
  if (!(ball.radius > 0)) throw InvalidParameter("ball radius must be positive");
  if (!(cap.h > 0)) throw InvalidParameter("grid spacing must be positive");
  int n = domain.dimension();
  ball_capacity(n);  // validates n >= 3

  CompactMask mask = clip_ball_complement(domain, ball, cap.h);
  std::int64_t count = 0;
  double best2 = 0;
  std::int64_t total = mask.cell_count();
  for (std::int64_t f = 0; f < total; ++f) {
    if (!mask.occupancy[static_cast<std::size_t>(f)]) continue;
    ++count;
    Vec d = mask.cell_center(f) - ball.center;
    best2 = std::max(best2, dot(d, d));
  }
  MaskEvidence ev =
      gather_evidence(count, std::sqrt(best2), ball, cap.h, n);
  if (!screens_decide(ev, gamma)) improve_with_enclosure(ev, mask);
  if (!screens_decide(ev, gamma))
    ev.exact = capacity_grid(mask, solver_options(cap)).estimate;
  return decide(ev, ball, gamma);
}

std::vector<RadiusResult> capacitary_radius_multi(
    const DomainSpec& domain, const std::vector<double>& gammas,
    const SearchParams& search) {
  if (gammas.empty()) throw InvalidParameter("no gamma values given");
  double prev = 0;
  for (double g : gammas) {
    check_gamma_range(g);
    if (!(g > prev)) throw InvalidParameter("gammas must be ascending");
    prev = g;
  }
  int dim = domain.dimension();
  ball_capacity(dim);  // validates dim >= 3
  validate_search(search, dim);
  double spacing = default_spacing(search);
  const auto& grid = search.radius_grid;
  double r_top = grid.back();

  LazyOmega omega = make_sampler(domain, search.bbox, 2 * r_top, search.cap);
  PreFilter filter(domain, dim, search.cap.h);

  // evidence memo across gammas: the per-gamma bisections repeat candidate
  // balls, and the capacity evidence does not depend on gamma
  std::map<std::array<std::uint64_t, 5>, MaskEvidence> memo;
  auto key_of = [&](const Ball& b) {
    std::array<std::uint64_t, 5> k{};
    for (int a = 0; a < dim; ++a)
      k[static_cast<std::size_t>(a)] = std::bit_cast<std::uint64_t>(b.center[a]);
    k[4] = std::bit_cast<std::uint64_t>(b.radius);
    return k;
  };
  auto cached_evidence = [&](const Ball& b, const std::vector<double>& gs,
                             bool allow_exact, bool* solved) {
    auto k = key_of(b);
    auto hit = memo.find(k);
    if (hit != memo.end()) {
      bool undecided = false;
      for (double g : gs)
        if (!screens_decide(hit->second, g)) undecided = true;
      // screen-only evidence may have been stored under a spent budget;
      // recompute only when this caller both needs and may solve
      if (!undecided || hit->second.exact || !allow_exact) return hit->second;
    }
    MaskEvidence ev = candidate_evidence(omega, b, gs, search.cap, allow_exact,
                                         solved);
    memo[k] = ev;
    return ev;
  };

  std::vector<SlotState> slots(gammas.size());
  for (std::size_t ri = 0; ri < grid.size(); ++ri) {
    double r = grid[ri];
    std::vector<Vec> centers = center_lattice(search.bbox, spacing, r, dim);
    int solves_used = 0;
    for (const Vec& c : centers) {
      Ball ball{c, r};
      // only gammas not yet satisfied at this radius need a verdict
      std::vector<double> open_gammas;
      for (std::size_t gi = 0; gi < gammas.size(); ++gi)
        if (slots[gi].best_index != static_cast<int>(ri)) open_gammas.push_back(gammas[gi]);
      if (open_gammas.empty()) break;
      if (filter.rejects(ball, open_gammas.back())) continue;
      bool allow_exact =
          search.solve_budget <= 0 || solves_used < search.solve_budget;
      bool solved = false;
      MaskEvidence ev =
          cached_evidence(ball, open_gammas, allow_exact, &solved);
      if (solved) ++solves_used;
      for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        if (slots[gi].best_index == static_cast<int>(ri)) continue;
        // undecided under a spent budget: counts as a fail, never a pass
        if (!screens_decide(ev, gammas[gi])) continue;
        NegligibilityVerdict v = decide(ev, ball, gammas[gi]);
        if (passes(v)) {
          slots[gi].best_radius = r;
          slots[gi].best_index = static_cast<int>(ri);
          slots[gi].witness = ball;
          slots[gi].witness_verdict = v;
        }
      }
    }
  }

  std::vector<RadiusResult> results(gammas.size());
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    const SlotState& st = slots[gi];
    double gamma = gammas[gi];
    if (st.best_radius < 0) {
      results[gi] = assemble(search, spacing, RadiusKind::capacitary, st, 0, 0,
                             false, std::nullopt, std::nullopt);
      continue;
    }
    bool at_top = st.best_index + 1 == static_cast<int>(grid.size());
    double lo = st.best_radius;
    double hi;
    Ball probe_witness = *st.witness;
    std::optional<NegligibilityVerdict> probe_verdict;
    if (at_top) {
      // doubling probes at the witness center
      bool both = true;
      for (double f : {2.0, 4.0}) {
        Ball pb{st.witness->center, r_top * f};
        NegligibilityVerdict v = probe_verdict_at(domain, pb, gamma, search.cap);
        if (passes(v)) {
          probe_witness = pb;
          probe_verdict = v;
        } else {
          both = false;
          break;
        }
      }
      if (both) {
        results[gi] =
            assemble(search, spacing, RadiusKind::capacitary, st, 4 * r_top,
                     spacing, true, probe_witness, probe_verdict);
        continue;
      }
      hi = 2 * r_top;
    } else {
      hi = grid[static_cast<std::size_t>(st.best_index) + 1];
    }
    // bisect at the witness center; every accepted midpoint is itself a
    // certified pass, so the refined value stays a lower bound
    SlotState refined_state = st;
    for (int k = 0; k < search.bisect_iters; ++k) {
      double m = 0.5 * (lo + hi);
      Ball mb{st.witness->center, m};
      MaskEvidence ev = cached_evidence(mb, {gamma}, true, nullptr);
      NegligibilityVerdict v = decide(ev, mb, gamma);
      if (passes(v)) {
        lo = m;
        refined_state.witness = mb;
        refined_state.witness_verdict = v;
      } else {
        hi = m;
      }
    }
    double refined = lo;
    double bracket = hi - lo;
    // optional confirmation at finer spacing; stepping the radius down on
    // failure keeps the reported value a certified pass at the fine spacing
    if (search.cap.verify_h > 0 && search.cap.verify_h < search.cap.h) {
      double rv = refined;
      for (int attempt = 0; attempt < 4 && rv > 0; ++attempt) {
        Ball fb{refined_state.witness->center, rv};
        NegligibilityVerdict fv =
            verdict_at_h(domain, fb, gamma, search.cap, search.cap.verify_h);
        if (passes(fv)) {
          refined_state.witness = fb;
          refined_state.witness_verdict = fv;
          refined = rv;
          break;
        }
        rv -= std::max(bracket, 0.01 * rv);
      }
    }
    results[gi] = assemble(search, spacing, RadiusKind::capacitary,
                           refined_state, refined, bracket, false,
                           std::nullopt, std::nullopt);
  }

  // a pass at a smaller gamma certifies every larger one with the same ball
  // and the same capacity evidence, so the sequence may be clamped monotone
  // by carrying the stronger result forward and rereading its verdict
  for (std::size_t gi = 1; gi < gammas.size(); ++gi) {
    const RadiusResult& prev = results[gi - 1];
    RadiusResult& cur = results[gi];
    if (prev.status != RadiusStatus::finite || !(prev.radius > cur.radius))
      continue;
    cur = prev;
    if (cur.witness_verdict) {
      NegligibilityVerdict& v = *cur.witness_verdict;
      v.gamma = gammas[gi];
      v.negligible = v.ratio <= v.gamma;
      double rel_ind =
          v.cap_ball > 0 ? v.cap_diff.error_indicator / v.cap_ball : 0;
      v.borderline = std::abs(v.ratio - v.gamma) <= rel_ind;
    }
  }
  return results;
}

RadiusResult capacitary_radius(const DomainSpec& domain, double gamma,
                               const SearchParams& search) {
  return capacitary_radius_multi(domain, {gamma}, search).front();
}

RadiusResult measure_radius(const DomainSpec& domain, double alpha,
                            const SearchParams& search) {
  if (!(alpha > 0) || !(alpha < 1))
    throw InvalidParameter("alpha must lie strictly between 0 and 1");
  int dim = domain.dimension();
  if (dim < 3) throw InvalidDimension("radius search requires dimension >= 3");
  validate_search(search, dim);
  double spacing = default_spacing(search);
  const auto& grid = search.radius_grid;
  double r_top = grid.back();
  double ball_vol_unit = sphere_area(dim) / dim;

  LazyOmega omega = make_sampler(domain, search.bbox, 2 * r_top, search.cap);
  PreFilter filter(domain, dim, search.cap.h);

  auto ratio_of = [&](const Ball& b) {
    Candidate c = scan_candidate(omega, b);
    double mes = double(c.count) * std::pow(omega.h, dim);
    return mes / (ball_vol_unit * std::pow(b.radius, dim));
  };
  // conservative one-cell-layer margin against voxel measure error
  auto accepts = [&](const Ball& b) {
    return ratio_of(b) <= alpha - omega.h / b.radius;
  };
  auto probe_accepts = [&](const Ball& pb) {
    CapParams pcap = search.cap;
    pcap.h = std::max(search.cap.h, pb.radius / 32.0);
    Box point_box;
    point_box.lo = pb.center;
    point_box.hi = pb.center;
    LazyOmega po = make_sampler(domain, point_box, pb.radius, pcap);
    Candidate c = scan_candidate(po, pb);
    double mes = double(c.count) * std::pow(po.h, dim);
    double ratio = mes / (ball_vol_unit * std::pow(pb.radius, dim));
    return ratio <= alpha - po.h / pb.radius;
  };

  SlotState st;
  for (std::size_t ri = 0; ri < grid.size(); ++ri) {
    double r = grid[ri];
    std::vector<Vec> centers = center_lattice(search.bbox, spacing, r, dim);
    for (const Vec& c : centers) {
      Ball ball{c, r};
      if (filter.rejects_measure(ball, alpha)) continue;
      if (accepts(ball)) {
        st.best_radius = r;
        st.best_index = static_cast<int>(ri);
        st.witness = ball;
        break;
      }
    }
  }
  if (st.best_radius < 0)
    return assemble(search, spacing, RadiusKind::measure, st, 0, 0, false,
                    std::nullopt, std::nullopt);

  bool at_top = st.best_index + 1 == static_cast<int>(grid.size());
  double lo = st.best_radius;
  double hi;
  if (at_top) {
    bool both = true;
    Ball top_witness = *st.witness;
    for (double f : {2.0, 4.0}) {
      Ball pb{st.witness->center, r_top * f};
      if (probe_accepts(pb))
        top_witness = pb;
      else {
        both = false;
        break;
      }
    }
    if (both)
      return assemble(search, spacing, RadiusKind::measure, st, 4 * r_top,
                      spacing, true, top_witness, std::nullopt);
    hi = 2 * r_top;
  } else {
    hi = grid[static_cast<std::size_t>(st.best_index) + 1];
  }
  for (int k = 0; k < search.bisect_iters; ++k) {
    double m = 0.5 * (lo + hi);
    Ball mb{st.witness->center, m};
    if (accepts(mb)) {
      lo = m;
      st.witness = mb;
    } else {
      hi = m;
    }
  }
  return assemble(search, spacing, RadiusKind::measure, st, lo, hi - lo, false,
                  std::nullopt, std::nullopt);
}

RadiusResult essential_radius(const DomainSpec& domain, double gamma,
                              const std::vector<double>& R_schedule,
                              const SearchParams& search) {
  if (R_schedule.empty()) throw InvalidParameter("empty R schedule");
  double prev = -1;
  for (double R : R_schedule) {
    if (!(R >= 0) || R <= prev)
      throw InvalidParameter("R schedule must be nonnegative and ascending");
    prev = R;
  }
  RadiusResult last;
  std::vector<std::array<double, 2>> seq;
  for (double R : R_schedule) {
    DomainSpec cut =
        R > 0 ? DomainSpec::intersect(
                    {domain, DomainSpec::complement_of(DomainSpec::ball_at(
                                 Vec::zeros(domain.dimension()), R))})
              : domain;
    last = capacitary_radius(cut, gamma, search);
    seq.push_back({R, last.radius});
  }
  last.kind = RadiusKind::essential;
  last.essential_sequence = std::move(seq);
  return last;
}

}  // namespace capdrum
