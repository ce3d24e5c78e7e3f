#pragma once

// L^p spectrum of the Laplace-Beltrami operator: the parabolic region
// sigma_p = {-(z^2 + rho^2) : |Im z| <= gamma_p rho} and the equal-modulus
// constructions built on it.

#include <vector>

#include "roekit/combination.hpp"
#include "roekit/numerics.hpp"
#include "roekit/space.hpp"

namespace roekit {

/// gamma_p for any p >= 1, with p > 2 mapped to its conjugate exponent.
double strip_gamma(double p);

/// Lambda(z) = -(z^2 + rho^2) at z = alpha + i gamma_p rho.
cplx spectrum_boundary_point(const SpaceParams& space, double p, double alpha);

/// True iff some square root z of -w - rho^2 has |Im z| <= gamma_p rho
/// (up to a relative slack of 1e-12).
bool spectrum_contains(const SpaceParams& space, double p, cplx w);

/// rho^2 (1 - gamma_p^2) = 4 rho^2 / (p p').
double min_modulus_on_spectrum(const SpaceParams& space, double p);

/// Brute-force min of |Lambda(alpha + i gamma_p rho)| over alpha in [lo, hi]
/// with step h.
double min_modulus_on_spectrum_grid(const SpaceParams& space, double p, double lo = -10.0, double hi = 10.0,
                                    double h = 1e-4);

struct EqualModulusSolution {
  double s = 0.0;
  /// arg Lambda(s + i gamma rho) - arg(reference), in [0, 2 pi).
  double theta = 0.0;
  cplx lambda;
  cplx eigenvalue;
};

/// s >= 0 with |Lambda(s + i gamma rho)| = target_modulus. The phase is taken
/// relative to `reference` (default: the positive real axis).
EqualModulusSolution equal_modulus_solve(const SpaceParams& space, double gamma, double target_modulus,
                                         cplx reference = 1.0);

struct CounterexamplePair {
  EigenCombination f;
  double p = 0.0;
  double beta = 0.0;
  double q = 0.0;
  double r = 0.0;
  /// Lambda(beta + i gamma_{p'} rho), the common modulus target.
  cplx target;
  /// Phases of the two eigenvalues relative to target, in the order of f.terms.
  double theta = 0.0;
  double psi = 0.0;
};

/// phi_{s - i gamma_q rho} + phi_{t - i gamma_r rho} with p < q < r < 2 splitting
/// (p, 2) into thirds and both eigenvalues of modulus |Lambda(beta + i gamma_{p'} rho)|.
CounterexamplePair counterexample_pair(const SpaceParams& space, double p, double beta);

/// phi_{alpha/2} + phi_{alpha/3}: both eigenvalue moduli below alpha^2 + rho^2.
EigenCombination one_sided_pair(const SpaceParams& space, double alpha);

}  // namespace roekit
