#include <cmath>
#include <cstdlib>

#include "capdrum/constants.hpp"
#include "capdrum/errors.hpp"
#include "capdrum/geometry.hpp"
#include "capdrum/json_io.hpp"
#include "doctest.h"

using namespace capdrum;

namespace {

constexpr double kPi = 3.14159265358979323846;

DomainSpec unit_ball() { return DomainSpec::ball_at(Vec{0, 0, 0}, 1.0); }

Box sym_box(double half) {
  return Box{Vec{-half, -half, -half}, Vec{half, half, half}};
}

}  // namespace

TEST_CASE("voxelized ball volume, inradius, and stats") {
  double h = 1.0 / 16;
  VoxelGrid g = voxelize(unit_ball(), sym_box(1.0), h);
  double vol = double(g.inside_count()) * h * h * h;
  CHECK(vol == doctest::Approx(4 * kPi / 3).epsilon(0.02));
  CHECK(inradius(g) == doctest::Approx(1.0).epsilon(2 * h));

  CompactMask m = voxelize_mask(unit_ball(), sym_box(1.2), h);
  MaskStats st = mask_stats(m);
  CHECK(st.count > 0);
  for (int a = 0; a < 3; ++a) CHECK(std::abs(st.centroid.x[a]) < h);
  CHECK(st.hull_radius > 1.0 - 2 * h);
  CHECK(st.hull_radius < 1.0 + 4 * h);
  CHECK(mask_measure(m) == doctest::Approx(4 * kPi / 3).epsilon(0.02));
}

TEST_CASE("translation by grid multiples preserves the voxel count") {
  double h = 1.0 / 16;
  Vec s{3 * h, -2 * h, 5 * h};
  VoxelGrid a = voxelize(unit_ball(), sym_box(1.0), h);
  Box moved{Vec{-1 + s.x[0], -1 + s.x[1], -1 + s.x[2]},
            Vec{1 + s.x[0], 1 + s.x[1], 1 + s.x[2]}};
  VoxelGrid b = voxelize(DomainSpec::translated(unit_ball(), s), moved, h);
  CHECK(a.inside_count() == b.inside_count());
}

TEST_CASE("scaling doubles cell counts per axis") {
  double h = 1.0 / 8;
  VoxelGrid a = voxelize(unit_ball(), sym_box(1.0), h);
  VoxelGrid b = voxelize(DomainSpec::scaled(unit_ball(), 2.0), sym_box(2.0), h);
  // the scaled set at the same spacing resolves twice as finely per axis
  CHECK(double(b.inside_count()) ==
        doctest::Approx(8.0 * double(a.inside_count())).epsilon(0.05));
}

TEST_CASE("boolean combinators satisfy cellwise identities") {
  double h = 1.0 / 16;
  Box bb = sym_box(1.5);
  DomainSpec a = unit_ball();
  DomainSpec b = DomainSpec::ball_at(Vec{0.7, 0, 0}, 0.8);

  auto count = [&](const DomainSpec& s) {
    return voxelize(s, bb, h).inside_count();
  };
  // inclusion-exclusion holds exactly on a fixed lattice
  CHECK(count(DomainSpec::unite({a, b})) ==
        count(a) + count(b) - count(DomainSpec::intersect({a, b})));

  DomainSpec box = DomainSpec::box_at(Vec{-1, -1, -1}, Vec{1, 1, 1});
  std::int64_t carved =
      count(DomainSpec::intersect({box, DomainSpec::complement_of(a)}));
  std::int64_t inside = count(DomainSpec::intersect({box, a}));
  // closed complement vs open set: boundary cells may land in both
  CHECK(carved + inside >= count(box));
  CHECK(carved + inside <= count(box) + 8 * 3 * 32 * 32);
}

TEST_CASE("half space fills the expected fraction") {
  double h = 1.0 / 8;
  DomainSpec hs = DomainSpec::half_space_at(Vec{0, 0, 1}, 0.0);
  VoxelGrid g = voxelize(hs, sym_box(1.0), h);
  // cell centers at z = -1 + (k + 1/2) h: exactly half lie below 0
  CHECK(g.inside_count() == g.cell_count() / 2);
}

TEST_CASE("periodic array repeats one tile exactly") {
  double h = 1.0 / 16;
  DomainSpec holes = DomainSpec::periodic(
      DomainSpec::ball_at(Vec{0.5, 0.5, 0.5}, 0.1),
      {Vec{1, 0, 0}, Vec{0, 1, 0}, Vec{0, 0, 1}}, {4, 4, 4});
  Box bb{Vec{0, 0, 0}, Vec{4, 4, 4}};
  CompactMask m = voxelize_mask(holes, bb, h);
  MaskStats st = mask_stats(m);
  CompactMask one = voxelize_mask(DomainSpec::ball_at(Vec{0.5, 0.5, 0.5}, 0.1),
                                  Box{Vec{0, 0, 0}, Vec{1, 1, 1}}, h);
  CHECK(st.count == 64 * mask_stats(one).count);
  CHECK(st.count > 0);
}

TEST_CASE("clip of ball minus domain") {
  double h = 1.0 / 16;
  // a ball inside the open set leaves nothing
  CompactMask empty = clip_ball_complement(unit_ball(), Ball{Vec{0, 0, 0}, 0.9}, h);
  CHECK(mask_stats(empty).count == 0);
  // a larger ball leaves the closed shell
  Ball big{Vec{0, 0, 0}, 1.25};
  CompactMask shell = clip_ball_complement(unit_ball(), big, h);
  CompactMask direct = voxelize_mask(
      DomainSpec::intersect({DomainSpec::ball_at(big.center, big.radius),
                             DomainSpec::complement_of(unit_ball())}),
      Box{Vec{-1.25, -1.25, -1.25}, Vec{1.25, 1.25, 1.25}}, h);
  CHECK(mask_stats(shell).count == mask_stats(direct).count);
  CHECK(mask_stats(shell).count > 0);
}

TEST_CASE("one-cell dilation grows and contains the original") {
  double h = 1.0 / 16;
  CompactMask m = voxelize_mask(DomainSpec::ball_at(Vec{0, 0, 0}, 0.4),
                                sym_box(0.6), h);
  CompactMask d = dilate_one_cell(m);
  REQUIRE(d.occupancy.size() == m.occupancy.size());
  std::int64_t extra = 0;
  for (std::size_t i = 0; i < m.occupancy.size(); ++i) {
    if (m.occupancy[i]) CHECK(d.occupancy[i]);
    if (d.occupancy[i] && !m.occupancy[i]) ++extra;
  }
  CHECK(extra > 0);
}

TEST_CASE("coarsening keeps majority blocks and drops sparse ones") {
  CompactMask m;
  m.origin = Vec{0, 0, 0};
  m.h = 0.5;
  m.dim = 3;
  m.dims = {4, 4, 4, 1};
  m.occupancy.assign(64, true);
  CompactMask c = coarsen(m);
  CHECK(c.h == doctest::Approx(1.0));
  CHECK(c.dims[0] == 2);
  CHECK(mask_stats(c).count == 8);

  // one of eight children occupied: below the half threshold
  m.occupancy.assign(64, false);
  m.occupancy[0] = true;
  CHECK(mask_stats(coarsen(m)).count == 0);

  // four of eight children: at the threshold, kept.  Flat index is
  // i0 + 4 (i1 + 4 i2) here.
  m.occupancy.assign(64, false);
  m.occupancy[0] = true;   // (0,0,0)
  m.occupancy[1] = true;   // (1,0,0)
  m.occupancy[4] = true;   // (0,1,0)
  m.occupancy[16] = true;  // (0,0,1)
  CHECK(mask_stats(coarsen(m)).count == 1);
}

TEST_CASE("cell budget rejects absurd grids up front") {
  CHECK(cell_budget() > 0);
  CHECK_THROWS_AS(voxelize(unit_ball(), sym_box(1.0), 1.0 / 4096),
                  ResourceLimit);
}

TEST_CASE("domain JSON round trip is canonical") {
  DomainSpec spec = DomainSpec::unite(
      {DomainSpec::translated(DomainSpec::scaled(unit_ball(), 2.0),
                              Vec{1, 0, -1}),
       DomainSpec::box_at(Vec{0, 0, 0}, Vec{1, 2, 3}),
       DomainSpec::intersect({DomainSpec::half_space_at(Vec{0, 0, 1}, 2.0),
                              DomainSpec::complement_of(DomainSpec::ball_at(
                                  Vec{0.5, 0.5, 0.5}, 0.25))}),
       DomainSpec::periodic(DomainSpec::ball_at(Vec{0, 0, 0}, 0.1),
                            {Vec{1, 0, 0}}, {3})});
  nlohmann::json j = to_json(spec);
  DomainSpec back = domain_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(dump_json(to_json(back)) == dump_json(j));
}

TEST_CASE("domain JSON rejects malformed trees") {
  CHECK_THROWS_AS(parse_domain_text("{\"op\": \"donut\"}"), SpecParseError);
  CHECK_THROWS_AS(parse_domain_text("not json at all"), SpecParseError);
  CHECK_THROWS_AS(parse_domain_text("{\"op\": \"ball\", \"center\": [0,0,0]}"),
                  SpecParseError);
  // unknown keys are rejected, not ignored
  CHECK_THROWS_AS(
      parse_domain_text(
          "{\"op\": \"ball\", \"center\": [0,0,0], \"radius\": 1, \"r\": 2}"),
      SpecParseError);
  // error paths name the offending node
  try {
    parse_domain_text(
        "{\"op\": \"union\", \"args\": [{\"op\": \"ball\", \"center\": "
        "[0,0,0], \"radius\": -1}]}");
    CHECK(false);
  } catch (const SpecParseError& e) {
    CHECK(std::string(e.what()).find("args[0]") != std::string::npos);
  }
}

TEST_CASE("bounding boxes cover the set when known") {
  std::optional<Box> bb = unit_ball().bounding_box();
  REQUIRE(bb.has_value());
  for (int a = 0; a < 3; ++a) {
    CHECK(bb->lo.x[a] == doctest::Approx(-1.0));
    CHECK(bb->hi.x[a] == doctest::Approx(1.0));
  }
  CHECK_FALSE(DomainSpec::half_space_at(Vec{1, 0, 0}, 0.0)
                  .bounding_box()
                  .has_value());
  CHECK_FALSE(
      DomainSpec::complement_of(unit_ball()).bounding_box().has_value());
}

TEST_CASE("dimension is inferred from payloads") {
  CHECK(unit_ball().dimension() == 3);
  CHECK(DomainSpec::ball_at(Vec{0, 0, 0, 0}, 1.0).dimension() == 4);
}
