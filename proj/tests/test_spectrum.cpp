#include <cmath>
#include <cstdint>
#include <vector>

#include "capdrum/constants.hpp"
#include "capdrum/errors.hpp"
#include "capdrum/geometry.hpp"
#include "capdrum/spectrum.hpp"
#include "doctest.h"

using namespace capdrum;

namespace {

constexpr double kPi = 3.14159265358979323846;

DomainSpec unit_cube() {
  return DomainSpec::box_at(Vec{0, 0, 0}, Vec{1, 1, 1});
}

DomainSpec slab_z(double half_width) {
  return DomainSpec::intersect(
      {DomainSpec::half_space_at(Vec{0, 0, 1}, half_width),
       DomainSpec::half_space_at(Vec{0, 0, -1}, half_width)});
}

}  // namespace

TEST_CASE("cube ground state approaches 3 pi^2") {
  Box bb{Vec{0, 0, 0}, Vec{1, 1, 1}};
  EigenResult res = bottom_eigenvalue(unit_cube(), bb, 1.0 / 16);
  REQUIRE(res.extrapolated.has_value());
  CHECK(*res.extrapolated == doctest::Approx(3 * kPi * kPi).epsilon(0.02));
  CHECK(res.lambda < 3 * kPi * kPi);  // zero-outside walls bias low
  CHECK(res.residual < 1e-5);
  CHECK(res.iterations > 0);
  CHECK(res.value() == *res.extrapolated);

  EigenResult fine = bottom_eigenvalue(unit_cube(), bb, 1.0 / 32);
  CHECK(*fine.extrapolated == doctest::Approx(3 * kPi * kPi).epsilon(0.005));
  // refinement moves the extrapolated value toward the limit
  CHECK(std::abs(*fine.extrapolated - 3 * kPi * kPi) <
        std::abs(*res.extrapolated - 3 * kPi * kPi));
}

TEST_CASE("ball ground state approaches pi^2") {
  Box bb{Vec{-1, -1, -1}, Vec{1, 1, 1}};
  EigenResult res =
      bottom_eigenvalue(DomainSpec::ball_at(Vec{0, 0, 0}, 1.0), bb, 1.0 / 32);
  REQUIRE(res.extrapolated.has_value());
  CHECK(*res.extrapolated == doctest::Approx(kPi * kPi).epsilon(0.02));
}

TEST_CASE("separable box matches the exact sum of squares") {
  DomainSpec box = DomainSpec::box_at(Vec{0, 0, 0}, Vec{1, 1, 2});
  Box bb{Vec{0, 0, 0}, Vec{1, 1, 2}};
  EigenResult res = bottom_eigenvalue(box, bb, 1.0 / 16);
  double exact = kPi * kPi * (1 + 1 + 0.25);
  CHECK(*res.extrapolated == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("eigenvalue shrinks when the domain grows") {
  EigenResult small = bottom_eigenvalue(
      unit_cube(), Box{Vec{0, 0, 0}, Vec{1, 1, 1}}, 1.0 / 16);
  EigenResult large = bottom_eigenvalue(
      DomainSpec::box_at(Vec{0, 0, 0}, Vec{1.25, 1, 1}),
      Box{Vec{0, 0, 0}, Vec{1.25, 1, 1}}, 1.0 / 16);
  CHECK(large.value() < small.value());
}

TEST_CASE("eigenvalue scales like one over length squared") {
  EigenResult a = bottom_eigenvalue(unit_cube(), Box{Vec{0, 0, 0}, Vec{1, 1, 1}},
                                    1.0 / 16, 1e-8);
  EigenResult b = bottom_eigenvalue(DomainSpec::scaled(unit_cube(), 2.0),
                                    Box{Vec{0, 0, 0}, Vec{2, 2, 2}}, 1.0 / 8,
                                    1e-8);
  // identical discrete systems up to the scale factor
  CHECK(b.lambda == doctest::Approx(a.lambda / 4).epsilon(1e-7));
  CHECK(*b.extrapolated == doctest::Approx(*a.extrapolated / 4).epsilon(1e-7));
}

TEST_CASE("width extrapolation recovers the slab from boxes") {
  EigenResult res = width_extrapolated_eigenvalue(
      slab_z(1.0), Box{Vec{-1, -1, -1}, Vec{1, 1, 1}}, 2.0, 1.0 / 16);
  // lambda(L) = pi^2/4 + c/L^2 exactly for the truncated slab
  CHECK(res.value() == doctest::Approx(kPi * kPi / 4).epsilon(0.015));
  CHECK_THROWS_AS(width_extrapolated_eigenvalue(
                      slab_z(1.0), Box{Vec{-1, -1, -1}, Vec{1, 1, 1}}, 1.0,
                      1.0 / 16),
                  InvalidParameter);
}

TEST_CASE("empty grids and bad parameters are rejected") {
  Box away{Vec{5, 5, 5}, Vec{6, 6, 6}};
  CHECK_THROWS_AS(
      bottom_eigenvalue(DomainSpec::ball_at(Vec{0, 0, 0}, 1.0), away, 1.0 / 8),
      EmptyDomain);
  CHECK_THROWS_AS(bottom_eigenvalue(unit_cube(),
                                    Box{Vec{0, 0, 0}, Vec{1, 1, 1}}, 1.0 / 8,
                                    -1e-6),
                  InvalidParameter);
}

TEST_CASE("rayleigh quotient dominates the bottom eigenvalue") {
  Box bb{Vec{0, 0, 0}, Vec{1, 1, 1}};
  VoxelGrid grid = voxelize(unit_cube(), bb, 1.0 / 16);
  EigenPair pair = lowest_eigenpair(grid, 1e-8);

  CHECK(rayleigh_quotient(grid, pair.field) ==
        doctest::Approx(pair.info.lambda).epsilon(1e-6));

  // any admissible field sits at or above the bottom
  std::vector<double> u(grid.cell_count(), 0.0);
  std::uint64_t s = 12345;
  for (std::int64_t f = 0; f < grid.cell_count(); ++f) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    if (grid.occupancy[std::size_t(f)])
      u[std::size_t(f)] = 0.1 + double(s >> 40) / double(1 << 24);
  }
  CHECK(rayleigh_quotient(grid, u) >= pair.info.lambda * (1 - 1e-9));

  std::vector<double> zero(grid.cell_count(), 0.0);
  CHECK_THROWS_AS(rayleigh_quotient(grid, zero), InvalidParameter);
}

TEST_CASE("trial function on a clean witness ball") {
  DomainSpec ball = DomainSpec::ball_at(Vec{0, 0, 0}, 1.0);
  Ball witness{Vec{0, 0, 0}, 0.8};
  TestFunctionReport rep = trial_function_bound(ball, witness, 0.5, 1.0 / 16);
  CHECK(rep.negligible_input);
  CHECK(rep.kappa == doctest::Approx(1.0 / 14).epsilon(1e-12));
  CHECK(rep.cutoff_bound == doctest::Approx(2 * 14 / 0.8).epsilon(1e-12));
  CHECK(rep.potential_sup_check <= 1.0 + 1e-9);
  // admissible for the intersection with the witness ball
  CHECK(rep.rayleigh >= kPi * kPi * 0.95);
  double C = upper_constant(0.5, 3);
  CHECK(rep.rayleigh <= 1.1 * C / (0.8 * 0.8));
}

TEST_CASE("trial function flags a non-negligible witness but stays admissible") {
  DomainSpec ball = DomainSpec::ball_at(Vec{0, 0, 0}, 1.0);
  Ball witness{Vec{0, 0, 0}, 1.3};
  TestFunctionReport rep = trial_function_bound(ball, witness, 0.3, 1.0 / 16);
  CHECK_FALSE(rep.negligible_input);
  CHECK(rep.rayleigh >= kPi * kPi * 0.95);
}

TEST_CASE("trial function refuses to vanish") {
  CHECK_THROWS_AS(trial_function_bound(DomainSpec::none(3),
                                       Ball{Vec{0, 0, 0}, 0.5}, 0.5, 1.0 / 8),
                  DegenerateTestFunction);
}
