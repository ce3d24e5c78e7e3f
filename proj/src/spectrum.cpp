#include "roekit/spectrum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace roekit {

double strip_gamma(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("strip_gamma: p must be >= 1");
  if (p > 2.0) p = conjugate_exponent(p);
  return gamma_p(p);
}

cplx spectrum_boundary_point(const SpaceParams& space, double p, double alpha) {
  return eigenvalue_of(space, cplx(alpha, strip_gamma(p) * space.rho()));
}

bool spectrum_contains(const SpaceParams& space, double p, cplx w) {
  const double rho = space.rho();
  const double g = strip_gamma(p);
  const cplx z = std::sqrt(-w - rho * rho);
  return std::abs(z.imag()) <= g * rho + 1e-12 * (std::abs(z) + rho);
}

double min_modulus_on_spectrum(const SpaceParams& space, double p) {
  const double g = strip_gamma(p);
  const double rho = space.rho();
  return rho * rho * (1.0 - g * g);
}

double min_modulus_on_spectrum_grid(const SpaceParams& space, double p, double lo, double hi, double h) {
  if (!(hi > lo) || !(h > 0.0)) throw std::invalid_argument("min_modulus_on_spectrum_grid: bad range");
  const auto steps = static_cast<long>(std::floor((hi - lo) / h + 1e-9));
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i <= steps; ++i) {
    const double alpha = lo + h * static_cast<double>(i);
    best = std::min(best, std::abs(spectrum_boundary_point(space, p, alpha)));
  }
  return best;
}

EqualModulusSolution equal_modulus_solve(const SpaceParams& space, double gamma, double target_modulus,
                                         cplx reference) {
  if (!(std::abs(gamma) <= 1.0)) throw std::invalid_argument("equal_modulus_solve: |gamma| must not exceed 1");
  if (!(target_modulus > 0.0) || !std::isfinite(target_modulus))
    throw std::invalid_argument("equal_modulus_solve: target modulus must be positive");
  if (reference == cplx(0.0)) throw std::invalid_argument("equal_modulus_solve: zero reference");
  const double rho = space.rho();
  // |Lambda(s + i gamma rho)|^2 = (s^2 + A)^2 + B s^2
  const double A = rho * rho * (1.0 - gamma * gamma);
  const double B = 4.0 * gamma * gamma * rho * rho;
  const double T = target_modulus;
  if (T < A * (1.0 - 1e-14))
    throw std::domain_error("equal_modulus_solve: target modulus " + std::to_string(T) +
                            " below the minimum " + std::to_string(A) + " on the line");
  const double b = 2.0 * A + B;
  const double c = (A - T) * (A + T);
  const double S = c >= 0.0 ? 0.0 : -2.0 * c / (b + std::sqrt(b * b - 4.0 * c));
  EqualModulusSolution out;
  out.s = std::sqrt(S);
  out.lambda = cplx(out.s, gamma * rho);
  out.eigenvalue = eigenvalue_of(space, out.lambda);
  out.theta = numerics::phase_0_2pi(out.eigenvalue * std::conj(reference));
  return out;
}

CounterexamplePair counterexample_pair(const SpaceParams& space, double p, double beta) {
  if (!(p > 1.0 && p < 2.0)) throw std::invalid_argument("counterexample_pair: p must lie in (1, 2)");
  if (!std::isfinite(beta) || beta == 0.0) throw std::invalid_argument("counterexample_pair: beta must be nonzero");
  const double rho = space.rho();
  CounterexamplePair out;
  out.p = p;
  out.beta = beta;
  out.q = p + (2.0 - p) / 3.0;
  out.r = p + 2.0 * (2.0 - p) / 3.0;
  // gamma_{p'} = -gamma_p
  out.target = eigenvalue_of(space, cplx(beta, -gamma_p(p) * rho));
  const double T = std::abs(out.target);
  const auto first = equal_modulus_solve(space, -gamma_p(out.q), T, out.target);
  const auto second = equal_modulus_solve(space, -gamma_p(out.r), T, out.target);
  out.theta = first.theta;
  out.psi = second.theta;
  out.f.space = space;
  out.f.terms = {{1.0, first.lambda}, {1.0, second.lambda}};
  return out;
}

EigenCombination one_sided_pair(const SpaceParams& space, double alpha) {
  if (!std::isfinite(alpha) || alpha == 0.0) throw std::invalid_argument("one_sided_pair: alpha must be nonzero");
  return EigenCombination{space, {{1.0, alpha / 2.0}, {1.0, alpha / 3.0}}};
}

}  // namespace roekit
