#include "capdrum/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <utility>

#include "capdrum/errors.hpp"
#include "edt.hpp"

namespace capdrum {

Vec operator+(const Vec& a, const Vec& b) {
  Vec r = a;
  for (int i = 0; i < a.dim; ++i) r.x[i] += b.x[i];
  return r;
}

Vec operator-(const Vec& a, const Vec& b) {
  Vec r = a;
  for (int i = 0; i < a.dim; ++i) r.x[i] -= b.x[i];
  return r;
}

Vec operator*(double s, const Vec& a) {
  Vec r = a;
  for (int i = 0; i < a.dim; ++i) r.x[i] *= s;
  return r;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.dim; ++i) s += a.x[i] * b.x[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// ---- DomainSpec ----------------------------------------------------------

namespace {

Membership flipped(Membership m) {
  return m == Membership::open ? Membership::closed : Membership::open;
}

bool leq(double a, double b, Membership m) {
  return m == Membership::open ? a < b : a <= b;
}

}  // namespace

bool DomainSpec::contains(const Vec& p, Membership m) const {
  switch (op) {
    case Op::ball: {
      Vec d = p - center;
      return leq(dot(d, d), radius * radius, m);
    }
    case Op::box: {
      for (int i = 0; i < p.dim; ++i) {
        if (!leq(box_min.x[i], p.x[i], m) || !leq(p.x[i], box_max.x[i], m))
          return false;
      }
      return true;
    }
    case Op::half_space:
      return leq(dot(normal, p), offset, m);
    case Op::full_space:
      return true;
    case Op::empty:
      return false;
    case Op::set_union:
      for (const auto& a : args)
        if (a.contains(p, m)) return true;
      return false;
    case Op::intersection:
      for (const auto& a : args)
        if (!a.contains(p, m)) return false;
      return true;
    case Op::complement:
      return !args[0].contains(p, flipped(m));
    case Op::translate:
      return args[0].contains(p - shift, m);
    case Op::scale:
      return args[0].contains((1.0 / factor) * p, m);
    case Op::periodic_array: {
      // union over all lattice offsets of the child
      int k = int(lattice.size());
      std::vector<int> idx(k, 0);
      while (true) {
        Vec q = p;
        for (int j = 0; j < k; ++j) q = q - double(idx[j]) * lattice[j];
        if (args[0].contains(q, m)) return true;
        int j = 0;
        for (; j < k; ++j) {
          if (++idx[j] < counts[j]) break;
          idx[j] = 0;
        }
        if (j == k) return false;
      }
    }
  }
  return false;
}

int DomainSpec::dimension() const {
  switch (op) {
    case Op::ball:
      return center.dim;
    case Op::box:
      return box_min.dim;
    case Op::half_space:
      return normal.dim;
    case Op::translate:
      return shift.dim;
    case Op::full_space:
    case Op::empty:
      if (center.dim > 0) return center.dim;
      break;
    default:
      break;
  }
  for (const auto& a : args) {
    int d = a.dimension();
    if (d > 0) return d;
  }
  if (!lattice.empty()) return lattice[0].dim;
  throw InvalidParameter("domain spec has no payload to infer dimension from");
}

DomainSpec DomainSpec::ball_at(const Vec& c, double r) {
  if (!(r > 0)) throw InvalidParameter("ball radius must be positive");
  DomainSpec s;
  s.op = Op::ball;
  s.center = c;
  s.radius = r;
  return s;
}

DomainSpec DomainSpec::box_at(const Vec& lo, const Vec& hi) {
  for (int i = 0; i < lo.dim; ++i)
    if (!(lo.x[i] < hi.x[i]))
      throw InvalidParameter("box corners must be strictly ordered");
  DomainSpec s;
  s.op = Op::box;
  s.box_min = lo;
  s.box_max = hi;
  return s;
}

DomainSpec DomainSpec::half_space_at(const Vec& n, double off) {
  if (norm(n) == 0) throw InvalidParameter("half-space normal must be nonzero");
  DomainSpec s;
  s.op = Op::half_space;
  s.normal = n;
  s.offset = off;
  return s;
}

DomainSpec DomainSpec::full(int dim) {
  DomainSpec s;
  s.op = Op::full_space;
  s.center = Vec::zeros(dim);
  return s;
}

DomainSpec DomainSpec::none(int dim) {
  DomainSpec s;
  s.op = Op::empty;
  s.center = Vec::zeros(dim);
  return s;
}

DomainSpec DomainSpec::unite(std::vector<DomainSpec> parts) {
  DomainSpec s;
  s.op = Op::set_union;
  s.args = std::move(parts);
  return s;
}

DomainSpec DomainSpec::intersect(std::vector<DomainSpec> parts) {
  DomainSpec s;
  s.op = Op::intersection;
  s.args = std::move(parts);
  return s;
}

DomainSpec DomainSpec::complement_of(DomainSpec c) {
  DomainSpec s;
  s.op = Op::complement;
  s.args.push_back(std::move(c));
  return s;
}

DomainSpec DomainSpec::translated(DomainSpec c, const Vec& by) {
  DomainSpec s;
  s.op = Op::translate;
  s.args.push_back(std::move(c));
  s.shift = by;
  return s;
}

DomainSpec DomainSpec::scaled(DomainSpec c, double f) {
  if (!(f > 0)) throw InvalidParameter("scale factor must be positive");
  DomainSpec s;
  s.op = Op::scale;
  s.args.push_back(std::move(c));
  s.factor = f;
  return s;
}

DomainSpec DomainSpec::periodic(DomainSpec c, std::vector<Vec> lattice,
                                std::vector<int> counts) {
  if (lattice.size() != counts.size() || lattice.empty())
    throw InvalidParameter("periodic-array needs matching lattice and counts");
  for (int k : counts)
    if (k < 1) throw InvalidParameter("periodic-array counts must be >= 1");
  DomainSpec s;
  s.op = Op::periodic_array;
  s.args.push_back(std::move(c));
  s.lattice = std::move(lattice);
  s.counts = std::move(counts);
  return s;
}

std::optional<Box> DomainSpec::bounding_box() const {
  switch (op) {
    case Op::ball: {
      Box b;
      b.lo = center;
      b.hi = center;
      for (int i = 0; i < center.dim; ++i) {
        b.lo.x[i] -= radius;
        b.hi.x[i] += radius;
      }
      return b;
    }
    case Op::box:
      return Box{box_min, box_max};
    case Op::empty: {
      Box b;
      b.lo = center;
      b.hi = center;
      return b;
    }
    case Op::set_union: {
      std::optional<Box> acc;
      for (const auto& a : args) {
        auto b = a.bounding_box();
        if (!b) return std::nullopt;
        if (!acc) {
          acc = b;
        } else {
          for (int i = 0; i < b->lo.dim; ++i) {
            acc->lo.x[i] = std::min(acc->lo.x[i], b->lo.x[i]);
            acc->hi.x[i] = std::max(acc->hi.x[i], b->hi.x[i]);
          }
        }
      }
      return acc;
    }
    case Op::intersection: {
      // any bounded factor bounds the intersection
      for (const auto& a : args) {
        if (auto b = a.bounding_box()) return b;
      }
      return std::nullopt;
    }
    case Op::translate: {
      auto b = args[0].bounding_box();
      if (!b) return std::nullopt;
      b->lo = b->lo + shift;
      b->hi = b->hi + shift;
      return b;
    }
    case Op::scale: {
      auto b = args[0].bounding_box();
      if (!b) return std::nullopt;
      for (int i = 0; i < b->lo.dim; ++i) {
        double lo = factor * b->lo.x[i], hi = factor * b->hi.x[i];
        b->lo.x[i] = std::min(lo, hi);
        b->hi.x[i] = std::max(lo, hi);
      }
      return b;
    }
    case Op::periodic_array: {
      auto b = args[0].bounding_box();
      if (!b) return std::nullopt;
      Box acc = *b;
      for (size_t j = 0; j < lattice.size(); ++j) {
        Vec last = double(counts[j] - 1) * lattice[j];
        for (int i = 0; i < acc.lo.dim; ++i) {
          acc.lo.x[i] = std::min(acc.lo.x[i], b->lo.x[i] + last.x[i]);
          acc.hi.x[i] = std::max(acc.hi.x[i], b->hi.x[i] + last.x[i]);
        }
        *b = acc;
      }
      return acc;
    }
    default:
      return std::nullopt;  // half-space, full-space, complement
  }
}

// ---- grids ---------------------------------------------------------------

namespace {

template <class G>
Vec center_of(const G& g, std::int64_t flat) {
  Vec p = Vec::zeros(g.dim);
  for (int a = 0; a < g.dim; ++a) {
    std::int64_t i = flat % g.dims[a];
    flat /= g.dims[a];
    p.x[a] = g.origin.x[a] + (double(i) + 0.5) * g.h;
  }
  return p;
}

template <class G>
std::int64_t count_inside(const G& g) {
  std::int64_t c = 0;
  for (bool b : g.occupancy) c += b ? 1 : 0;
  return c;
}

}  // namespace

Vec VoxelGrid::cell_center(std::int64_t flat) const { return center_of(*this, flat); }

std::int64_t VoxelGrid::flat_index(const std::array<int, 4>& idx) const {
  std::int64_t f = 0;
  for (int a = dim - 1; a >= 0; --a) f = f * dims[a] + idx[a];
  return f;
}

std::int64_t VoxelGrid::inside_count() const { return count_inside(*this); }

Vec CompactMask::cell_center(std::int64_t flat) const { return center_of(*this, flat); }

std::int64_t CompactMask::inside_count() const { return count_inside(*this); }

std::int64_t cell_budget() {
  if (const char* s = std::getenv("CAPDRUM_MAX_CELLS")) {
    char* end = nullptr;
    long long v = std::strtoll(s, &end, 10);
    if (end != s && v > 0) return v;
  }
  return std::int64_t(1) << 27;
}

namespace {

struct GridShape {
  Vec origin;
  std::array<int, 4> dims{1, 1, 1, 1};
  int dim = 3;
};

GridShape shape_for(const Box& bbox, double h, bool enforce_min_side = true) {
  GridShape s;
  s.dim = bbox.dim();
  s.origin = bbox.lo;
  std::int64_t total = 1;
  for (int a = 0; a < s.dim; ++a) {
    double extent = bbox.hi.x[a] - bbox.lo.x[a];
    if (!(extent > 0)) throw InvalidParameter("bbox must be nonempty");
    if (enforce_min_side && h > extent * (1 + 1e-12))
      throw InvalidParameter("grid spacing exceeds shortest bbox side");
    s.dims[a] = std::max(1, int(std::ceil(extent / h - 1e-9)));
    total *= s.dims[a];
  }
  if (total > cell_budget())
    throw ResourceLimit("grid of " + std::to_string(total) +
                        " cells exceeds CAPDRUM_MAX_CELLS");
  return s;
}

template <class G, class Pred>
void fill_occupancy(G& g, const Pred& pred) {
  std::int64_t total = g.cell_count();
  g.occupancy.assign(total, false);
  std::array<int, 4> idx{0, 0, 0, 0};
  Vec p = Vec::zeros(g.dim);
  for (int a = 0; a < g.dim; ++a)
    p.x[a] = g.origin.x[a] + 0.5 * g.h;
  for (std::int64_t f = 0; f < total; ++f) {
    g.occupancy[f] = pred(p);
    // advance multi-index
    for (int a = 0; a < g.dim; ++a) {
      if (++idx[a] < g.dims[a]) {
        p.x[a] = g.origin.x[a] + (double(idx[a]) + 0.5) * g.h;
        break;
      }
      idx[a] = 0;
      p.x[a] = g.origin.x[a] + 0.5 * g.h;
    }
  }
}

}  // namespace

VoxelGrid voxelize(const DomainSpec& spec, const Box& bbox, double h) {
  GridShape s = shape_for(bbox, h);
  VoxelGrid g;
  g.origin = s.origin;
  g.h = h;
  g.dims = s.dims;
  g.dim = s.dim;
  fill_occupancy(g, [&](const Vec& p) { return spec.contains(p, Membership::open); });
  return g;
}

CompactMask voxelize_mask(const DomainSpec& spec, const Box& bbox, double h) {
  GridShape s = shape_for(bbox, h);
  CompactMask g;
  g.origin = s.origin;
  g.h = h;
  g.dims = s.dims;
  g.dim = s.dim;
  fill_occupancy(g, [&](const Vec& p) { return spec.contains(p, Membership::closed); });
  return g;
}

CompactMask clip_ball_complement(const DomainSpec& spec, const Ball& ball,
                                 double h) {
  if (!(ball.radius > 0)) throw InvalidParameter("ball radius must be positive");
  if (!(h > 0)) throw InvalidParameter("grid spacing must be positive");
  Box bbox;
  bbox.lo = ball.center;
  bbox.hi = ball.center;
  for (int i = 0; i < ball.center.dim; ++i) {
    bbox.lo.x[i] -= ball.radius;
    bbox.hi.x[i] += ball.radius;
  }
  GridShape s = shape_for(bbox, h, /*enforce_min_side=*/false);
  CompactMask g;
  g.origin = s.origin;
  g.h = h;
  g.dims = s.dims;
  g.dim = s.dim;
  double r2 = ball.radius * ball.radius;
  fill_occupancy(g, [&](const Vec& p) {
    Vec d = p - ball.center;
    return dot(d, d) <= r2 && !spec.contains(p, Membership::open);
  });
  return g;
}

double mask_measure(const CompactMask& mask) {
  return double(mask.inside_count()) * std::pow(mask.h, mask.dim);
}

double inradius(const VoxelGrid& grid) {
  // EDT with sites = outside cells, on a grid padded by one virtual outside
  // layer so that beyond-the-box counts as exterior.
  std::array<int, 4> pd{1, 1, 1, 1};
  std::int64_t total = 1;
  for (int a = 0; a < grid.dim; ++a) {
    pd[a] = grid.dims[a] + 2;
    total *= pd[a];
  }
  std::vector<double> f(total, 0.0);  // padded cells start as sites
  // interior: site iff not occupied
  std::array<int, 4> idx{0, 0, 0, 0};
  for (std::int64_t g = 0; g < grid.cell_count(); ++g) {
    if (grid.occupancy[g]) {
      std::int64_t pf = 0;
      for (int a = grid.dim - 1; a >= 0; --a) pf = pf * pd[a] + (idx[a] + 1);
      f[pf] = detail::kEdtInf;
    }
    for (int a = 0; a < grid.dim; ++a) {
      if (++idx[a] < grid.dims[a]) break;
      idx[a] = 0;
    }
  }
  detail::edt_squared(f, pd, grid.dim);
  double best = 0;
  for (double d : f) best = std::max(best, d);
  return std::sqrt(best) * grid.h;
}

CompactMask dilate_one_cell(const CompactMask& mask) {
  CompactMask out = mask;
  std::array<std::int64_t, 4> stride{1, 1, 1, 1};
  for (int a = 1; a < mask.dim; ++a) stride[a] = stride[a - 1] * mask.dims[a - 1];
  std::array<int, 4> idx{0, 0, 0, 0};
  for (std::int64_t f = 0; f < mask.cell_count(); ++f) {
    if (mask.occupancy[f]) {
      for (int a = 0; a < mask.dim; ++a) {
        if (idx[a] > 0) out.occupancy[f - stride[a]] = true;
        if (idx[a] + 1 < mask.dims[a]) out.occupancy[f + stride[a]] = true;
      }
    }
    for (int a = 0; a < mask.dim; ++a) {
      if (++idx[a] < mask.dims[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

CompactMask coarsen(const CompactMask& mask) {
  CompactMask out;
  out.origin = mask.origin;
  out.h = 2 * mask.h;
  out.dim = mask.dim;
  std::int64_t total = 1;
  for (int a = 0; a < mask.dim; ++a) {
    out.dims[a] = (mask.dims[a] + 1) / 2;
    total *= out.dims[a];
  }
  // majority vote over the children present in the fine grid: the coarse
  // mask tracks the same set at 2h instead of dilating it, so capacity
  // differences between the two read as discretization error
  std::vector<std::uint8_t> occ(total, 0), present(total, 0);
  std::array<int, 4> idx{0, 0, 0, 0};
  for (std::int64_t f = 0; f < mask.cell_count(); ++f) {
    std::int64_t cf = 0;
    for (int a = mask.dim - 1; a >= 0; --a) cf = cf * out.dims[a] + idx[a] / 2;
    ++present[cf];
    if (mask.occupancy[f]) ++occ[cf];
    for (int a = 0; a < mask.dim; ++a) {
      if (++idx[a] < mask.dims[a]) break;
      idx[a] = 0;
    }
  }
  out.occupancy.assign(total, false);
  for (std::int64_t cf = 0; cf < total; ++cf)
    if (2 * occ[cf] >= present[cf] && occ[cf] > 0) out.occupancy[cf] = true;
  return out;
}

MaskStats mask_stats(const CompactMask& mask) {
  MaskStats st;
  st.centroid = Vec::zeros(mask.dim);
  Vec lo = Vec::zeros(mask.dim), hi = Vec::zeros(mask.dim);
  bool first = true;
  for (std::int64_t f = 0; f < mask.cell_count(); ++f) {
    if (!mask.occupancy[f]) continue;
    Vec p = mask.cell_center(f);
    ++st.count;
    for (int a = 0; a < mask.dim; ++a) st.centroid.x[a] += p.x[a];
    if (first) {
      lo = hi = p;
      first = false;
    } else {
      for (int a = 0; a < mask.dim; ++a) {
        lo.x[a] = std::min(lo.x[a], p.x[a]);
        hi.x[a] = std::max(hi.x[a], p.x[a]);
      }
    }
  }
  if (st.count == 0) return st;
  for (int a = 0; a < mask.dim; ++a) st.centroid.x[a] /= double(st.count);
  double r2 = 0;
  for (std::int64_t f = 0; f < mask.cell_count(); ++f) {
    if (!mask.occupancy[f]) continue;
    Vec d = mask.cell_center(f) - st.centroid;
    r2 = std::max(r2, dot(d, d));
  }
  st.hull_radius = std::sqrt(r2) + 0.5 * std::sqrt(double(mask.dim)) * mask.h;
  st.occupied_bbox = Box{lo, hi};
  return st;
}

}  // namespace capdrum
