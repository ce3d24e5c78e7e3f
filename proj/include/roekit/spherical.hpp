#pragma once

// Elementary spherical functions: radial ODE route, N-integral route, and
// extraction of the large-radius coefficients c(lambda), c(-lambda).

#include <utility>
#include <vector>

#include "roekit/numerics.hpp"
#include "roekit/space.hpp"

namespace roekit {

/// A spectral parameter lambda together with the space's rho.
struct SpectralPoint {
  cplx lambda;
  double rho = 0.0;

  /// Lambda(lambda) = -(lambda^2 + rho^2).
  cplx eigenvalue() const { return -(lambda * lambda + rho * rho); }
  /// Largest p in (0, 2] with |Im lambda| <= gamma_p * rho.
  double strip_p() const { return 2.0 * rho / (rho + std::abs(lambda.imag())); }
};

/// Lambda(lambda) = -(lambda^2 + rho^2).
inline cplx eigenvalue_of(const SpaceParams& space, cplx lambda) {
  return -(lambda * lambda + space.rho() * space.rho());
}

struct OdeOptions {
  double rel_tol = 1e-13;
  double abs_tol = 1e-15;
  /// Radius below which the power series replaces integration.
  double t_seed = 1e-3;
};

/// phi_lambda(a_t) on an ascending nonnegative grid, from the radial equation
/// u'' + (J'/J) u' = -(lambda^2 + rho^2) u with u(0) = 1, u'(0) = 0.
std::vector<cplx> phi_ode(const SpaceParams& space, cplx lambda, const std::vector<double>& t_grid,
                          const OdeOptions& opt = {});

/// Same as phi_ode but returns e^{rho t} phi_lambda(a_t), which stays O(1)
/// for real lambda and so keeps full relative accuracy at large t.
std::vector<cplx> phi_ode_scaled(const SpaceParams& space, cplx lambda, const std::vector<double>& t_grid,
                                 const OdeOptions& opt = {});

struct NIntegralOptions {
  double rel_tol = 1e-9;
  /// Allowed analytic bound on the discarded tails.
  double tail_tol = 1e-10;
};

/// phi_lambda(a_t) = int_N P_{a_t}(n)^{1/2 - i lambda/Q} P_1(n)^{1/2 + i lambda/Q} dn
/// on a Damek-Ricci space (DR normalization), as a quadrature in
/// (|X|^2/4, |Y|) polar coordinates. l = 0 reduces to a 1-D integral.
cplx phi_n_integral(const SpaceParams& space, cplx lambda, double t, const NIntegralOptions& opt = {});

struct CFit {
  double lambda = 0.0;
  cplx c_plus;
  cplx c_minus;
  std::pair<double, double> fit_window;
  std::pair<double, double> decay_window;
  /// Slope of log max|E| per unit bin over decay_window, bins above the noise floor.
  double residual_decay_rate = 0.0;
  /// Condition number of the column-scaled design matrix.
  double condition = 0.0;
  /// Number of exponential correction orders used next to the leading pair.
  int correction_orders = 0;
};

struct CFitOptions {
  /// Window for the least-squares fit; t1 <= t0 selects t0 + max(8, 4 periods).
  double t0 = 4.0;
  double t1 = 0.0;
  /// Window on which the residual decay rate is measured.
  double decay_t0 = 4.0;
  double decay_t1 = 12.0;
  int correction_orders = 3;
  double max_condition = 1e12;
};

/// Fits e^{rho t} phi_lambda(a_t) by c_+ e^{i lambda t} + c_- e^{-i lambda t}
/// plus decaying corrections e^{-k beta t}(...) with beta = 2 (symmetric) or
/// 1 (DR), and measures the decay of E = psi - c_+ e^{i lambda t} - c_- e^{-i lambda t}.
CFit fit_c(const SpaceParams& space, double lambda, const CFitOptions& opt = {});

struct EnvelopeRatio {
  double ratio_min = 0.0;
  double ratio_max = 0.0;
};

/// Min and max over t in [t_lo, t_hi] (step h) of
/// |phi_{alpha + i gamma_p rho}(a_t)| e^{rho (1 - gamma_p) t}, divided by
/// (1 + t) when p = 2 and alpha = 0.
EnvelopeRatio envelope_check(const SpaceParams& space, double p, double alpha, double t_lo, double t_hi,
                             double h = 0.01);

}  // namespace roekit
