#include "capdrum/constants.hpp"

#include <cmath>
#include <string>

#include "capdrum/errors.hpp"

namespace capdrum {

namespace {

constexpr int kMaxDim = 20;  // formulas well-conditioned up to here

void check_dim(int n, int lowest) {
  if (n < lowest || n > kMaxDim) {
    throw InvalidDimension("dimension " + std::to_string(n) +
                           " outside supported range [" +
                           std::to_string(lowest) + ", " +
                           std::to_string(kMaxDim) + "]");
  }
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0)) {
    throw InvalidParameter("gamma must lie strictly in (0,1), got " +
                           std::to_string(gamma));
  }
}

}  // namespace

double sphere_area(int n) {
  check_dim(n, 2);
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_capacity(int n, double r) {
  check_dim(n, 3);
  if (!(r > 0.0)) {
    throw InvalidParameter("ball radius must be positive");
  }
  return (n - 2) * sphere_area(n) * std::pow(r, n - 2);
}

double lemma_constant(int n) {
  check_dim(n, 3);
  return 4.0 * sphere_area(n) * (1.0 - 2.0 / (double(n) * n));
}

int covering_multiplicity(int n) {
  check_dim(n, 3);
  double ln_n = std::log(double(n));
  return int(std::floor(n * ln_n + n * std::log(ln_n) + 5.0 * n));
}

double lower_constant(double gamma, int n,
                      std::optional<int> multiplicity_override) {
  check_dim(n, 3);
  check_gamma(gamma);
  int N = multiplicity_override.value_or(covering_multiplicity(n));
  if (N < 1) {
    throw InvalidParameter("covering multiplicity must be a positive integer");
  }
  return gamma * double(n) * n * (n - 2) / (4.0 * (double(n) * n - 2.0) * N);
}

double kappa(double gamma, int n) {
  check_dim(n, 3);
  check_gamma(gamma);
  double a = 1.0 / (4.0 * (n - 1));
  double b = (1.0 - gamma) / (2.0 * (4 * n - 5) * gamma);
  return std::min(a, b);
}

double upper_constant(double gamma, int n) {
  double k = kappa(gamma, n);
  return 32.0 / ((1.0 - gamma) * (1.0 - gamma) * k * k * k);
}

double isoperimetric_constant(int n) {
  check_dim(n, 3);
  double e = double(n) / (n - 2);
  return std::pow(double(n - 2), -e) * std::pow(sphere_area(n), -2.0 / (n - 2)) / n;
}

ExplicitConstants explicit_constants(int n, double gamma,
                                     std::optional<int> multiplicity_override) {
  ExplicitConstants c;
  c.n = n;
  c.gamma = gamma;
  c.omega_n = sphere_area(n);
  c.cap_unit_ball = ball_capacity(n, 1.0);
  c.C_lemma = lemma_constant(n);
  c.N_cov = multiplicity_override.value_or(covering_multiplicity(n));
  c.kappa = kappa(gamma, n);
  c.c_lower = lower_constant(gamma, n, multiplicity_override);
  c.C_upper = upper_constant(gamma, n);
  c.A_iso = isoperimetric_constant(n);
  return c;
}

}  // namespace capdrum
