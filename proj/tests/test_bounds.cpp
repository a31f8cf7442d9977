#include <cmath>

#include "capdrum/bounds.hpp"
#include "capdrum/errors.hpp"
#include "capdrum/json_io.hpp"
#include "doctest.h"

using namespace capdrum;

namespace {

constexpr double kPi = 3.14159265358979323846;

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

RadiusResult finite_radius(double r, double step = 1e-6) {
  RadiusResult res;
  res.radius = r;
  res.status = RadiusStatus::finite;
  res.kind = RadiusKind::capacitary;
  res.radius_step = step;
  return res;
}

EigenResult oracle_value(double lam) {
  EigenResult e;
  e.lambda = lam;
  e.h = 1.0 / 32;
  e.iterations = 10;
  e.residual = 1e-6;
  return e;
}

}  // namespace

TEST_CASE("verdict assembly from a fixed radius") {
  double lam = kPi * kPi;

  SUBCASE("bounds straddle the oracle") {
    BoundsReport rep =
        report_from_radius(3, 0.5, finite_radius(1.0), oracle_value(lam));
    CHECK(rep.lower == doctest::Approx(1.0 / 112).epsilon(1e-12));
    REQUIRE(rep.upper.has_value());
    CHECK(*rep.upper == doctest::Approx(351232.0).epsilon(1e-12));
    CHECK(rep.verdict == Verdict::sandwich_holds);
    CHECK(rep.eps_total ==
          doctest::Approx(rep.eps_radius + rep.eps_cap + rep.eps_eig));
  }

  SUBCASE("radius too large pushes the upper bound below the oracle") {
    BoundsReport rep =
        report_from_radius(3, 0.5, finite_radius(200.0), oracle_value(lam));
    CHECK(*rep.upper < lam);
    CHECK(rep.verdict == Verdict::violated_upper);
  }

  SUBCASE("radius too small pushes the lower bound above the oracle") {
    BoundsReport rep =
        report_from_radius(3, 0.5, finite_radius(0.02), oracle_value(lam));
    CHECK(rep.lower > lam);
    CHECK(rep.verdict == Verdict::violated_lower);
  }

  SUBCASE("a declared radius bracket widens the acceptance band") {
    // same radius as the violation case, but with an honest bracket wide
    // enough to cover the oracle
    BoundsReport rep = report_from_radius(3, 0.5, finite_radius(0.02, 0.006),
                                          oracle_value(lam));
    CHECK(rep.eps_radius == doctest::Approx(0.6));
    CHECK(rep.verdict == Verdict::sandwich_holds);
  }

  SUBCASE("no oracle, no verdict") {
    BoundsReport rep =
        report_from_radius(3, 0.5, finite_radius(1.0), std::nullopt);
    CHECK(rep.verdict == Verdict::oracle_missing);
    CHECK(rep.lower > 0);
    CHECK(rep.upper.has_value());
  }

  SUBCASE("zero radius blows the bounds up") {
    RadiusResult zero;
    zero.status = RadiusStatus::zero;
    BoundsReport rep = report_from_radius(3, 0.5, zero, oracle_value(lam));
    CHECK(std::isinf(rep.lower));
    REQUIRE(rep.upper.has_value());
    CHECK(std::isinf(*rep.upper));
    // a finite oracle can neither confirm nor violate divergent bounds
    CHECK(rep.verdict == Verdict::oracle_missing);
  }

  SUBCASE("truncation warning reads as lambda zero") {
    RadiusResult trunc = finite_radius(4.0);
    trunc.status = RadiusStatus::infinite;
    trunc.truncation_warning = true;
    BoundsReport rep = report_from_radius(3, 0.5, trunc, oracle_value(lam));
    CHECK(rep.lower == 0.0);
    CHECK(*rep.upper == 0.0);
    CHECK(rep.verdict == Verdict::sandwich_holds);
  }
}

TEST_CASE("capacity error budget only counts the uncovered part") {
  RadiusResult res = finite_radius(1.0);
  NegligibilityVerdict v;
  v.cap_ball = 10.0;
  v.gamma = 0.5;
  v.ratio = 0.49;                    // margin 0.01
  v.cap_diff.error_indicator = 0.2;  // rel 0.02
  res.witness_verdict = v;
  BoundsReport rep = report_from_radius(3, 0.5, res, std::nullopt);
  CHECK(rep.eps_cap == doctest::Approx((2 * 0.02 - 0.01) / 0.5));

  // a margin of two indicators fully covers the risk
  res.witness_verdict->ratio = 0.45;
  rep = report_from_radius(3, 0.5, res, std::nullopt);
  CHECK(rep.eps_cap == 0.0);
}

TEST_CASE("two sided bounds on the unit ball") {
  OracleParams oracle;
  oracle.enabled = true;
  oracle.h = 1.0 / 16;
  oracle.bbox = Box{Vec{-1, -1, -1}, Vec{1, 1, 1}};
  oracle.with_construction = true;

  BoundsReport rep = two_sided(unit_ball(), 0.5,
                               quick_search(0.25, 0.5, 1.25, 4, 1.0 / 16),
                               oracle);
  CHECK(rep.verdict == Verdict::sandwich_holds);
  REQUIRE(rep.oracle_lambda.has_value());
  double lam = rep.oracle_lambda->value();
  CHECK(lam == doctest::Approx(kPi * kPi).epsilon(0.02));
  CHECK(rep.lower <= lam * (1 + rep.eps_total));
  REQUIRE(rep.upper.has_value());
  CHECK(*rep.upper >= lam * (1 - rep.eps_total));
  CHECK(rep.eps_total < 0.1);
  REQUIRE(rep.construction_upper.has_value());
  // the trial function is admissible, hence at or above the true bottom
  CHECK(*rep.construction_upper >= lam * 0.9);
  CHECK(*rep.construction_upper <= *rep.upper * 1.1);
}

TEST_CASE("volume based lower bound") {
  BoundsReport rep =
      lieb_lower(unit_ball(), 0.5, quick_search(0.25, 0.5, 1.6, 6, 1.0 / 16));
  REQUIRE(rep.alpha.has_value());
  CHECK(*rep.alpha == 0.5);
  CHECK(rep.gamma == doctest::Approx(std::pow(0.5, 1.0 / 3.0)).epsilon(1e-12));
  CHECK_FALSE(rep.upper.has_value());
  CHECK(rep.verdict == Verdict::oracle_missing);
  CHECK(rep.radius.kind == RadiusKind::measure);
  CHECK(rep.lower ==
        doctest::Approx(rep.constants.c_lower /
                        (rep.radius.radius * rep.radius.radius)));
  // a valid lower bound for the unit ball sits below pi^2
  CHECK(rep.lower < kPi * kPi);
}

TEST_CASE("bounded domains have empty essential spectrum") {
  BoundsReport rep = essential_bounds(
      unit_ball(), 0.5, {2.0, 4.0}, quick_search(0.25, 0.5, 1.25, 4, 1.0 / 16));
  CHECK(rep.discrete_spectrum);
  CHECK(std::isinf(rep.lower));
  REQUIRE(rep.upper.has_value());
  CHECK(std::isinf(*rep.upper));
  CHECK(rep.radius.status == RadiusStatus::zero);

  // divergent bounds serialize as the string "inf"
  std::string text = dump_json(to_json(rep));
  CHECK(text.find("\"inf\"") != std::string::npos);
}
