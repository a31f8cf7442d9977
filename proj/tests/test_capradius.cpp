#include <cmath>

#include "capdrum/capradius.hpp"
#include "capdrum/errors.hpp"
#include "capdrum/geometry.hpp"
#include "doctest.h"

using namespace capdrum;

namespace {

DomainSpec unit_ball() { return DomainSpec::ball_at(Vec{0, 0, 0}, 1.0); }

SearchParams quick_search(double half, double r_min, double r_max, int steps,
                          double h) {
  SearchParams s;
  s.bbox = Box{Vec{-half, -half, -half}, Vec{half, half, half}};
  s.radius_grid = linear_radius_grid(r_min, r_max, steps);
  s.bisect_iters = 3;
  s.solve_budget = 4;
  s.cap.h = h;
  s.cap.tol = 1e-6;
  return s;
}

}  // namespace

TEST_CASE("radius grid helper") {
  std::vector<double> g = linear_radius_grid(0.5, 1.5, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(0.5));
  CHECK(g.back() == doctest::Approx(1.5));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(linear_radius_grid(1.0, 1.0, 1).size() == 1);
  CHECK_THROWS_AS(linear_radius_grid(1.0, 0.5, 3), InvalidParameter);
  CHECK_THROWS_AS(linear_radius_grid(-1.0, 0.5, 3), InvalidParameter);
}

TEST_CASE("negligibility of concentric test balls") {
  CapParams cap;
  cap.h = 1.0 / 16;

  // fully inside: empty defect
  NegligibilityVerdict in =
      is_negligible(unit_ball(), Ball{Vec{0, 0, 0}, 0.5}, 0.5, cap);
  CHECK(in.negligible);
  CHECK(in.ratio == doctest::Approx(0.0));
  CHECK(in.cap_ball == doctest::Approx(4 * 3.14159265358979 * 0.5).epsilon(1e-10));

  // sticking out: the defect shell encloses the ball, so its grid capacity
  // is that of the outer ball and the ratio lands near one
  NegligibilityVerdict out =
      is_negligible(unit_ball(), Ball{Vec{0, 0, 0}, 1.25}, 0.5, cap);
  CHECK_FALSE(out.negligible);
  CHECK(out.ratio > 0.5);
}

TEST_CASE("capacitary radius of the unit ball") {
  RadiusResult res =
      capacitary_radius(unit_ball(), 0.5, quick_search(0.25, 0.5, 1.25, 4,
                                                       1.0 / 16));
  CHECK(res.status == RadiusStatus::finite);
  CHECK(res.kind == RadiusKind::capacitary);
  REQUIRE(res.witness.has_value());
  REQUIRE(res.witness_verdict.has_value());
  CHECK(res.witness_verdict->negligible);
  CHECK(res.witness_verdict->ratio <= 0.5);
  // the ball itself is the witness: radius sits at one
  CHECK(res.radius > 0.95);
  CHECK(res.radius < 1.15);
  CHECK(res.radius_step > 0);
  CHECK_FALSE(res.truncation_warning);
}

TEST_CASE("radii are monotone in gamma and share one scan") {
  std::vector<RadiusResult> rows = capacitary_radius_multi(
      unit_ball(), {0.1, 0.5, 0.9}, quick_search(0.25, 0.5, 1.25, 4, 1.0 / 16));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].radius <= rows[1].radius);
  CHECK(rows[1].radius <= rows[2].radius);
  for (const RadiusResult& r : rows) {
    CHECK(r.status == RadiusStatus::finite);
    CHECK(r.radius > 0.9);
  }
}

TEST_CASE("radius grows with the domain") {
  SearchParams s = quick_search(0.25, 0.4, 1.25, 5, 1.0 / 16);
  RadiusResult small = capacitary_radius(
      DomainSpec::ball_at(Vec{0, 0, 0}, 0.8), 0.5, s);
  RadiusResult large = capacitary_radius(unit_ball(), 0.5, s);
  CHECK(small.radius <= large.radius + 1e-12);
}

TEST_CASE("radius scales with the domain and the search") {
  SearchParams base = quick_search(0.25, 0.5, 1.25, 4, 1.0 / 16);
  RadiusResult a = capacitary_radius(unit_ball(), 0.5, base);

  SearchParams doubled = quick_search(0.5, 1.0, 2.5, 4, 1.0 / 8);
  RadiusResult b =
      capacitary_radius(DomainSpec::scaled(unit_ball(), 2.0), 0.5, doubled);
  CHECK(b.radius == doctest::Approx(2 * a.radius).epsilon(1e-3));
}

TEST_CASE("full space truncates with a warning") {
  RadiusResult res = capacitary_radius(
      DomainSpec::full(3), 0.5, quick_search(0.25, 0.5, 1.25, 4, 1.0 / 16));
  CHECK(res.truncation_warning);
  CHECK(res.status == RadiusStatus::infinite);
}

TEST_CASE("measure radius of the unit ball hits the volume threshold") {
  // (r^3 - 1)/r^3 <= alpha pins r at (1 - alpha)^{-1/3}
  SearchParams s = quick_search(0.25, 0.5, 1.6, 6, 1.0 / 16);
  RadiusResult res = measure_radius(unit_ball(), 0.5, s);
  CHECK(res.kind == RadiusKind::measure);
  CHECK(res.status == RadiusStatus::finite);
  double expect = std::pow(0.5, -1.0 / 3.0);
  CHECK(res.radius == doctest::Approx(expect).epsilon(0.06));
}

TEST_CASE("essential radius of a bounded domain collapses to zero") {
  SearchParams s = quick_search(0.25, 0.5, 1.25, 4, 1.0 / 16);
  RadiusResult res = essential_radius(unit_ball(), 0.5, {2.0, 4.0}, s);
  CHECK(res.kind == RadiusKind::essential);
  CHECK(res.status == RadiusStatus::zero);
  CHECK(res.radius == 0.0);
  REQUIRE(res.essential_sequence.size() == 2);
  CHECK(res.essential_sequence[0][0] == doctest::Approx(2.0));
  CHECK(res.essential_sequence[1][0] == doctest::Approx(4.0));
  CHECK(res.essential_sequence[1][1] == 0.0);
}

TEST_CASE("search parameters are validated") {
  SearchParams s = quick_search(0.25, 0.5, 1.25, 4, 1.0 / 16);
  CHECK_THROWS_AS(capacitary_radius(unit_ball(), 0.0, s), InvalidParameter);
  CHECK_THROWS_AS(capacitary_radius(unit_ball(), 1.0, s), InvalidParameter);

  SearchParams empty = s;
  empty.radius_grid.clear();
  CHECK_THROWS_AS(capacitary_radius(unit_ball(), 0.5, empty), InvalidParameter);

  SearchParams unsorted = s;
  unsorted.radius_grid = {1.0, 0.5};
  CHECK_THROWS_AS(capacitary_radius(unit_ball(), 0.5, unsorted),
                  InvalidParameter);

  CHECK_THROWS_AS(capacitary_radius_multi(unit_ball(), {0.5, 0.3}, s),
                  InvalidParameter);
  CHECK_THROWS_AS(capacitary_radius_multi(unit_ball(), {}, s),
                  InvalidParameter);

  CHECK_THROWS_AS(measure_radius(unit_ball(), 1.5, s), InvalidParameter);
  CHECK_THROWS_AS(essential_radius(unit_ball(), 0.5, {4.0, 2.0}, s),
                  InvalidParameter);
}
