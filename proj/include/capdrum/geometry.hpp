#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace capdrum {

// Point in R^n, n <= 4.  Grid machinery is dimension-generic up to 4;
// closed-form constants go higher but never need a Vec.
struct Vec {
  int dim = 3;
  std::array<double, 4> x{0, 0, 0, 0};

  Vec() = default;
  Vec(std::initializer_list<double> v) {
    dim = int(v.size());
    int i = 0;
    for (double t : v) x[i++] = t;
  }
  static Vec zeros(int d) {
    Vec v;
    v.dim = d;
    return v;
  }
  double& operator[](int i) { return x[i]; }
  double operator[](int i) const { return x[i]; }
};

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);

struct Box {
  Vec lo, hi;
  int dim() const { return lo.dim; }
};

struct Ball {
  Vec center;
  double radius = 1.0;
};

// Which side of a primitive boundary a query point belongs to.  Open sets
// (domains) use strict interior; compact sets (masks, clipped balls) use the
// closure.  complement() swaps the mode so that the complement of an open
// set is closed.
enum class Membership { open, closed };

// Constructive description of a set: ball / box / half-space / full-space /
// empty combined by union, intersection, complement, translation, uniform
// scaling about the origin, and periodic repetition along lattice vectors.
struct DomainSpec {
  enum class Op {
    ball,
    box,
    half_space,
    full_space,
    empty,
    set_union,
    intersection,
    complement,
    translate,
    scale,
    periodic_array,
  };

  Op op = Op::empty;
  std::vector<DomainSpec> args;  // children for combinators

  // primitive / combinator payloads
  Vec center;                 // ball
  double radius = 0;          // ball
  Vec box_min, box_max;       // box
  Vec normal;                 // half-space: { x : normal . x < offset }
  double offset = 0;          // half-space
  Vec shift;                  // translate
  double factor = 1;          // scale
  std::vector<Vec> lattice;   // periodic-array vectors
  std::vector<int> counts;    // repetitions per lattice vector

  bool contains(const Vec& p, Membership m = Membership::open) const;
  int dimension() const;  // inferred from payload points; throws if unset

  static DomainSpec ball_at(const Vec& c, double r);
  static DomainSpec box_at(const Vec& lo, const Vec& hi);
  static DomainSpec half_space_at(const Vec& n, double off);
  static DomainSpec full(int dim);
  static DomainSpec none(int dim);
  static DomainSpec unite(std::vector<DomainSpec> parts);
  static DomainSpec intersect(std::vector<DomainSpec> parts);
  static DomainSpec complement_of(DomainSpec s);
  static DomainSpec translated(DomainSpec s, const Vec& by);
  static DomainSpec scaled(DomainSpec s, double f);
  static DomainSpec periodic(DomainSpec s, std::vector<Vec> lattice,
                             std::vector<int> counts);

  // Smallest axis box known to contain the set; nullopt when unbounded
  // (complements, half-spaces, full-space).
  std::optional<Box> bounding_box() const;
};

// Uniform cell-centered occupancy grid.  Cell (i0..i_{d-1}) has center
// origin + (i+1/2) h per axis; index i0 varies fastest.
struct VoxelGrid {
  Vec origin;
  double h = 1;
  std::array<int, 4> dims{1, 1, 1, 1};
  int dim = 3;
  std::vector<bool> occupancy;

  std::int64_t cell_count() const {
    std::int64_t c = 1;
    for (int a = 0; a < dim; ++a) c *= dims[a];
    return c;
  }
  Vec cell_center(std::int64_t flat) const;
  std::int64_t flat_index(const std::array<int, 4>& idx) const;
  std::int64_t inside_count() const;
};

// Same layout as VoxelGrid; occupancy marks membership in a compact set.
struct CompactMask {
  Vec origin;
  double h = 1;
  std::array<int, 4> dims{1, 1, 1, 1};
  int dim = 3;
  std::vector<bool> occupancy;

  std::int64_t cell_count() const {
    std::int64_t c = 1;
    for (int a = 0; a < dim; ++a) c *= dims[a];
    return c;
  }
  Vec cell_center(std::int64_t flat) const;
  std::int64_t inside_count() const;
  bool empty() const { return inside_count() == 0; }
};

// Aggregate geometry of the occupied cells, used by the capacity solvers.
struct MaskStats {
  std::int64_t count = 0;
  Vec centroid;
  double hull_radius = 0;  // circumscribed-ball radius about the centroid,
                           // covering whole cells
  Box occupied_bbox;       // tight box around occupied cell centers
};
MaskStats mask_stats(const CompactMask& mask);

// Configured cell budget (env CAPDRUM_MAX_CELLS, default 2^27).
std::int64_t cell_budget();

VoxelGrid voxelize(const DomainSpec& spec, const Box& bbox, double h);

// Compact mask of closed-ball-minus-domain: cells with center in the closed
// ball and not in the open set.
CompactMask clip_ball_complement(const DomainSpec& spec, const Ball& ball,
                                 double h);

// Voxelization of the closed set described by spec over bbox (closure
// membership), as a mask for the capacity solvers.
CompactMask voxelize_mask(const DomainSpec& spec, const Box& bbox, double h);

double mask_measure(const CompactMask& mask);

// Largest inscribed-ball radius over inside cell centers; cells beyond the
// grid count as outside.
double inradius(const VoxelGrid& grid);

// One-cell (face-neighbor) dilation.
CompactMask dilate_one_cell(const CompactMask& mask);

// Factor-2 coarsening; a coarse cell is occupied when at least half of its
// in-grid children are, approximating the same set at spacing 2h.
CompactMask coarsen(const CompactMask& mask);

}  // namespace capdrum
