#pragma once

#include <optional>
#include <vector>

#include "capdrum/geometry.hpp"

namespace capdrum {

struct EigenResult {
  double lambda = 0;  // discrete bottom eigenvalue at spacing h
  double h = 0;
  int iterations = 0;   // outer inverse-power iterations
  double residual = 0;  // ||A v - lambda v|| / (lambda ||v||) at exit
  // 2 lambda(h) - lambda(2h); cancels the first-order error of the
  // zero-outside boundary treatment.
  std::optional<double> extrapolated;

  double value() const { return extrapolated ? *extrapolated : lambda; }
};

struct EigenPair {
  EigenResult info;
  std::vector<double> field;  // ground state, indexed by flat cell, zero on
                              // outside cells, normalized to unit 2-norm
};

// Smallest eigenvalue of the (2n+1)-point Dirichlet Laplacian on the inside
// cells of the grid, zero outside.  Inverse power iteration with conjugate
// gradient inner solves.
EigenResult lowest_eigenvalue(const VoxelGrid& grid, double tol = 1e-6);
EigenPair lowest_eigenpair(const VoxelGrid& grid, double tol = 1e-6);

// Discrete |grad u|^2 / |u|^2 with the same stencil and zero-outside
// convention; entries of u on outside cells are ignored (treated as zero).
double rayleigh_quotient(const VoxelGrid& grid, const std::vector<double>& u);

// Voxelize the domain inside bbox at h (and 2h when extrapolate is set) and
// return the discrete bottom eigenvalue, warm-starting the fine solve from
// the coarse eigenvector.
EigenResult bottom_eigenvalue(const DomainSpec& domain, const Box& bbox,
                              double h, double tol = 1e-6,
                              bool extrapolate = true);

// For domains the bbox truncates in some directions: solves on bbox and on
// bbox widened about its center by widen_factor, then removes the truncation
// error with the 1/L^2 model lambda(L) = lambda + const/L^2 (exact for
// separable product domains).  Both solves are h-extrapolated; the returned
// lambda and extrapolated both hold the width-extrapolated value.
EigenResult width_extrapolated_eigenvalue(const DomainSpec& domain,
                                          const Box& bbox, double widen_factor,
                                          double h, double tol = 1e-6);

// Explicit variational upper bound: the trial function u = eta (1 - P_F),
// where F is the one-cell dilation of the closed-ball-minus-domain mask, P_F
// its equilibrium potential, and eta a radial cutoff equal to 1 on the
// (1-kappa)r ball and falling linearly to 0 at radius r.
struct TestFunctionReport {
  Ball ball;
  double kappa = 0;
  double rayleigh = 0;            // quotient of the trial function
  double cutoff_bound = 0;        // 2/(kappa r), Lipschitz bound for eta
  double potential_sup_check = 0; // max of 1 - P_F over the support
  bool negligible_input = true;   // verdict for the same ball and gamma
};

TestFunctionReport trial_function_bound(const DomainSpec& domain,
                                        const Ball& ball, double gamma,
                                        double h);

}  // namespace capdrum
