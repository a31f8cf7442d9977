#include <cmath>

#include "capdrum/constants.hpp"
#include "capdrum/errors.hpp"
#include "doctest.h"

using namespace capdrum;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("sphere areas match the closed forms") {
  CHECK(sphere_area(2) == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(sphere_area(3) == doctest::Approx(4 * kPi).epsilon(1e-14));
  CHECK(sphere_area(4) == doctest::Approx(2 * kPi * kPi).epsilon(1e-14));
  // odd-dimension Gamma(5/2) path
  CHECK(sphere_area(5) ==
        doctest::Approx(8 * kPi * kPi / 3).epsilon(1e-14));
  CHECK(sphere_area(6) == doctest::Approx(kPi * kPi * kPi).epsilon(1e-14));
  CHECK_THROWS_AS(sphere_area(1), InvalidDimension);
}

TEST_CASE("ball capacity value and scaling") {
  CHECK(ball_capacity(3) == doctest::Approx(4 * kPi).epsilon(1e-14));
  CHECK(ball_capacity(3, 2) == doctest::Approx(8 * kPi).epsilon(1e-14));
  CHECK(ball_capacity(5) == doctest::Approx(3 * sphere_area(5)).epsilon(1e-14));
  for (int n : {3, 4, 5}) {
    for (double r : {0.5, 2.0, 7.0}) {
      CHECK(ball_capacity(n, r) ==
            doctest::Approx(ball_capacity(n) * std::pow(r, n - 2))
                .epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(ball_capacity(2), InvalidDimension);
  CHECK_THROWS_AS(ball_capacity(3, -1.0), InvalidParameter);
}

TEST_CASE("covering multiplicity at the supported corners") {
  // floor(n ln n + n ln ln n + 5n), checked by hand
  CHECK(covering_multiplicity(3) == 18);
  CHECK(covering_multiplicity(4) == 26);
  CHECK(covering_multiplicity(5) == 35);
  CHECK(covering_multiplicity(20) == 181);
}

TEST_CASE("lemma constant") {
  CHECK(lemma_constant(3) == doctest::Approx(112 * kPi / 9).epsilon(1e-13));
  CHECK(lemma_constant(4) ==
        doctest::Approx(4 * sphere_area(4) * (1 - 2.0 / 16)).epsilon(1e-13));
}

TEST_CASE("kappa branches") {
  // small gamma: the 1/(4(n-1)) cap is active
  CHECK(kappa(0.1, 3) == doctest::Approx(0.125).epsilon(1e-14));
  // the crossover for n = 3 sits at gamma = 4/11
  CHECK(kappa(0.5, 3) == doctest::Approx(1.0 / 14).epsilon(1e-14));
  CHECK(kappa(0.9, 3) == doctest::Approx(1.0 / 126).epsilon(1e-14));
  for (int n = 3; n <= 20; ++n) {
    for (double g : {0.05, 0.3, 0.5, 0.7, 0.95}) {
      double k = kappa(g, n);
      CHECK(k > 0);
      CHECK(k < 0.5);
    }
  }
}

TEST_CASE("frozen two-sided constants at gamma = 1/2, n = 3") {
  CHECK(std::abs(lower_constant(0.5, 3) - 1.0 / 112) < 1e-12);
  CHECK(std::abs(kappa(0.5, 3) - 1.0 / 14) < 1e-12);
  CHECK(std::abs(upper_constant(0.5, 3) - 351232.0) < 1e-6);
  CHECK(std::abs(upper_constant(0.9, 3) - 6401203200.0) < 1.0);
}

TEST_CASE("lower constant is linear in gamma and respects the override") {
  CHECK(lower_constant(0.6, 3) ==
        doctest::Approx(2 * lower_constant(0.3, 3)).epsilon(1e-13));
  // halving the multiplicity doubles the constant
  CHECK(lower_constant(0.5, 3, 9) ==
        doctest::Approx(2.0 / 112).epsilon(1e-13));
  ExplicitConstants c = explicit_constants(3, 0.5, 9);
  CHECK(c.N_cov == 9);
  CHECK(c.c_lower == doctest::Approx(2.0 / 112).epsilon(1e-13));
}

TEST_CASE("constants are monotone in gamma and keep c below C") {
  double prev_c = 0, prev_C = 0;
  for (double g : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double c = lower_constant(g, 3);
    double C = upper_constant(g, 3);
    CHECK(c > prev_c);
    CHECK(C > prev_C);
    CHECK(c < C);
    prev_c = c;
    prev_C = C;
  }
}

TEST_CASE("isoperimetric constant and the ball equality case") {
  CHECK(isoperimetric_constant(3) ==
        doctest::Approx(1.0 / (48 * kPi * kPi)).epsilon(1e-13));
  // mes(B_r) = A_n cap(B_r)^{n/(n-2)} exactly for balls
  for (int n : {3, 4, 5}) {
    for (double r : {0.5, 1.0, 3.0}) {
      double mes = sphere_area(n) / n * std::pow(r, n);
      double rhs = isoperimetric_constant(n) *
                   std::pow(ball_capacity(n, r), double(n) / (n - 2));
      CHECK(rhs == doctest::Approx(mes).epsilon(1e-12));
    }
  }
}

TEST_CASE("explicit constants bundle is self-consistent") {
  ExplicitConstants c = explicit_constants(3, 0.5);
  CHECK(c.n == 3);
  CHECK(c.gamma == 0.5);
  CHECK(c.omega_n == doctest::Approx(sphere_area(3)).epsilon(1e-15));
  CHECK(c.cap_unit_ball == doctest::Approx(ball_capacity(3)).epsilon(1e-15));
  CHECK(c.C_lemma == doctest::Approx(lemma_constant(3)).epsilon(1e-15));
  CHECK(c.N_cov == covering_multiplicity(3));
  CHECK(c.kappa == doctest::Approx(kappa(0.5, 3)).epsilon(1e-15));
  CHECK(c.c_lower == doctest::Approx(lower_constant(0.5, 3)).epsilon(1e-15));
  CHECK(c.C_upper == doctest::Approx(upper_constant(0.5, 3)).epsilon(1e-15));
  CHECK(c.A_iso == doctest::Approx(isoperimetric_constant(3)).epsilon(1e-15));
}

TEST_CASE("parameter domain is enforced") {
  CHECK_THROWS_AS(explicit_constants(2, 0.5), InvalidDimension);
  CHECK_THROWS_AS(explicit_constants(21, 0.5), InvalidDimension);
  CHECK_THROWS_AS(explicit_constants(3, 0.0), InvalidParameter);
  CHECK_THROWS_AS(explicit_constants(3, 1.0), InvalidParameter);
  CHECK_THROWS_AS(lower_constant(-0.1, 3), InvalidParameter);
  CHECK_THROWS_AS(upper_constant(1.5, 3), InvalidParameter);
  CHECK_THROWS_AS(kappa(0.0, 3), InvalidParameter);
}
