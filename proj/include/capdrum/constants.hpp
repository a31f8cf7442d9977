#pragma once

#include <optional>

namespace capdrum {

// Every closed-form constant entering the two-sided bound
//   c(gamma,n) * r^-2  <=  lambda  <=  C(gamma,n) * r^-2,
// evaluated from its printed formula.  Supported range n in [3, 20].
struct ExplicitConstants {
  int n = 0;
  double gamma = 0;
  double omega_n = 0;        // area of the unit sphere S^{n-1}
  double cap_unit_ball = 0;  // (n-2) * omega_n
  double C_lemma = 0;        // 4 * omega_n * (1 - 2/n^2)
  int N_cov = 0;             // covering multiplicity N(n)
  double kappa = 0;          // cutoff margin, in (0, 1/2)
  double c_lower = 0;        // c(gamma, n)
  double C_upper = 0;        // C(gamma, n)
  double A_iso = 0;          // isoperimetric constant A_n
};

// omega_n = 2 pi^{n/2} / Gamma(n/2).  n >= 2.
double sphere_area(int n);

// cap(closed ball of radius r) = (n-2) * omega_n * r^{n-2}.  n >= 3.
double ball_capacity(int n, double r = 1.0);

// C_n = 4 * omega_n * (1 - 2/n^2).
double lemma_constant(int n);

// N(n) = floor(n ln n + n ln ln n + 5 n); natural logs.
int covering_multiplicity(int n);

// c(gamma,n) = gamma n^2 (n-2) / (4 (n^2-2) N).  The covering multiplicity
// may be overridden by a caller who owns a better covering.
double lower_constant(double gamma, int n,
                      std::optional<int> multiplicity_override = std::nullopt);

// kappa = min{ 1/(4(n-1)), (1-gamma) / (2 (4n-5) gamma) }.
double kappa(double gamma, int n);

// C(gamma,n) = 32 (1-gamma)^-2 kappa^-3.
double upper_constant(double gamma, int n);

// A_n = n^-1 (n-2)^{-n/(n-2)} omega_n^{-2/(n-2)};
// mes F <= A_n cap(F)^{n/(n-2)}, equality for balls.
double isoperimetric_constant(int n);

ExplicitConstants explicit_constants(
    int n, double gamma,
    std::optional<int> multiplicity_override = std::nullopt);

}  // namespace capdrum
