#include "roekit/poisson.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace roekit {

namespace {

void require_dr(const SpaceParams& space, const char* what) {
  if (space.normalization() != Normalization::DamekRicci)
    throw std::invalid_argument(std::string(what) + ": requires a space in DR normalization");
}

void require_hyperbolic(const SpaceParams& space, const char* what) {
  if (!space.is_real_hyperbolic())
    throw std::invalid_argument(std::string(what) + ": requires real hyperbolic space in symmetric normalization");
}

}  // namespace

double poisson_mass(const SpaceParams& space, double t, double C) {
  require_dr(space, "poisson_mass");
  if (!(C > 0.0) || !std::isfinite(t)) throw std::invalid_argument("poisson_mass: bad arguments");
  const int m = space.first_multiplicity();
  const int l = space.second_multiplicity();
  const double Q = space.Q();
  const double sphere_const =
      std::pow(2.0, m - 1) * numerics::sphere_area(m) * (l > 0 ? numerics::sphere_area(l) : 1.0);
  // Outside [t - V, t + V] in log s the mass is below e^{-QV} C sphere_const pi / (2Q) per side.
  const double V = std::ceil((std::log(C * sphere_const * numerics::pi / Q) + 36.0) / Q);
  std::vector<double> breaks;
  for (double v = t - V; v < t + V; v += 1.0) breaks.push_back(v);
  breaks.push_back(t + V);
  numerics::QuadOptions opt;
  opt.abs_tol = 1e-15;
  opt.rel_tol = 1e-12;
  const double a = std::exp(t);
  const double logC = std::log(C);

  if (l == 0) {
    auto f = [&](double v) {
      const double u = std::exp(v);
      return std::exp(logC + Q * t - 2.0 * Q * std::log(a + u) + 0.5 * m * v);
    };
    return sphere_const * numerics::integrate_or_throw(f, breaks, opt, "poisson_mass").value;
  }
  auto inner = [&](double psi) {
    const double c = std::cos(psi);
    const double angular = std::pow(c, 0.5 * m - 1.0) * std::pow(std::sin(psi), l - 1);
    if (angular == 0.0) return 0.0;
    auto g = [&](double v) {
      const double s = std::exp(v);
      return std::exp(logC + Q * t - Q * std::log(a * a + 2.0 * a * s * c + s * s) + Q * v);
    };
    return angular * numerics::integrate_or_throw(g, breaks, opt, "poisson_mass (radial)").value;
  };
  const std::array<double, 3> psi_breaks{0.0, 0.25 * numerics::pi, 0.5 * numerics::pi};
  return sphere_const * numerics::integrate_or_throw(inner, psi_breaks, opt, "poisson_mass (angular)").value;
}

double normalize_C(const SpaceParams& space) {
  require_dr(space, "normalize_C");
  static std::mutex mu;
  static std::map<std::pair<int, int>, double> cache;
  const auto key = std::make_pair(space.first_multiplicity(), space.second_multiplicity());
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double C = 1.0 / poisson_mass(space, 0.0, 1.0);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, C);
  return C;
}

double poisson_kernel_N(const SpaceParams& space, double t, double xnorm, double ynorm) {
  require_dr(space, "poisson_kernel_N");
  if (xnorm < 0.0 || ynorm < 0.0) throw std::invalid_argument("poisson_kernel_N: norms must be nonnegative");
  const double Q = space.Q();
  const double a = std::exp(t);
  const double base = a + 0.25 * xnorm * xnorm;
  return normalize_C(space) * std::exp(Q * t - Q * std::log(base * base + ynorm * ynorm));
}

std::vector<double> zonal_harmonics(int n, int l_max, double x) {
  if (n < 2 || l_max < 0) throw std::invalid_argument("zonal_harmonics: bad arguments");
  const double alpha = 0.5 * (n - 2);
  std::vector<double> z(l_max + 1);
  z[0] = 1.0;
  if (l_max >= 1) z[1] = x;
  // Z_{l+1} = (2(l + a) x Z_l - l Z_{l-1}) / (l + 2a)
  for (int l = 1; l < l_max; ++l) z[l + 1] = (2.0 * (l + alpha) * x * z[l] - l * z[l - 1]) / (l + 2.0 * alpha);
  return z;
}

cplx ZonalBoundary::operator()(double theta) const {
  const auto z = zonal_harmonics(n, static_cast<int>(coeffs.size()) - 1, std::cos(theta));
  cplx acc = 0.0;
  for (std::size_t l = 0; l < coeffs.size(); ++l) acc += coeffs[l] * z[l];
  return acc;
}

cplx mode_profile(const SpaceParams& space, cplx lambda, int l, double t) {
  require_hyperbolic(space, "mode_profile");
  if (l < 0 || !(t >= 0.0)) throw std::invalid_argument("mode_profile: bad arguments");
  if (t == 0.0) return l == 0 ? 1.0 : 0.0;
  const int n = space.dim();
  const double rho = space.rho();
  const cplx expo = -(cplx(0.0, 1.0) * lambda + rho);
  numerics::QuadOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = 1e-13;
  std::vector<double> breaks;
  numerics::QuadResult<cplx> res;
  double norm = 0.0;

  if (n == 2) {
    // K = e^{-t} + 2 sinh t sin^2(phi/2) is sharply peaked at phi ~ e^{-t}.
    auto f = [&](double phi) {
      const double s = std::sin(0.5 * phi);
      const double K = std::exp(-t) + 2.0 * std::sinh(t) * s * s;
      return std::exp(expo * std::log(K)) * zonal_harmonics(2, l, std::cos(phi))[l];
    };
    breaks.push_back(0.0);
    for (double b = std::exp(-t) / 4.0; b < 0.5; b *= 4.0) breaks.push_back(b);
    for (double b = 0.5; b < numerics::pi; b += 0.5) breaks.push_back(b);
    breaks.push_back(numerics::pi);
    res = numerics::integrate(f, breaks, opt);
    norm = numerics::pi;
  } else {
    // v = log K: sin^{n-2} phi dphi = sin^{n-3} phi e^v dv / sinh t.
    const double e_minus = 2.0 / std::expm1(2.0 * t);   // e^{-t} / sinh t
    const double e_plus = -2.0 / std::expm1(-2.0 * t);  // e^{t} / sinh t
    auto f = [&](double v) {
      const double one_minus_c = e_minus * std::expm1(v + t);
      const double one_plus_c = -e_plus * std::expm1(v - t);
      const double c = v < 0.0 ? 1.0 - one_minus_c : one_plus_c - 1.0;
      const double sin2 = std::max(one_minus_c * one_plus_c, 0.0);
      const double jac = n == 3 ? 1.0 : std::pow(sin2, 0.5 * (n - 3));
      return std::exp((expo + 1.0) * v) * jac * zonal_harmonics(n, l, c)[l];
    };
    for (double v = -t; v < t; v += 0.5) breaks.push_back(v);
    breaks.push_back(t);
    res = numerics::integrate(f, breaks, opt);
    res.value /= std::sinh(t);
    res.error /= std::sinh(t);
    norm = std::sqrt(numerics::pi) * std::tgamma(0.5 * (n - 1)) / std::tgamma(0.5 * n);
  }
  if (!res.converged && res.error > 1e-9 * std::max(std::abs(res.value), 1e-300))
    throw NumericalError("mode_profile: quadrature did not converge at t = " + std::to_string(t));
  return res.value / norm;
}

cplx PoissonField::evaluate(double tt, double theta) const {
  const int l_max = static_cast<int>(boundary.coeffs.size()) - 1;
  const auto z = zonal_harmonics(space.dim(), l_max, std::cos(theta));
  cplx acc = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    if (boundary.coeffs[l] == cplx(0.0)) continue;
    acc += boundary.coeffs[l] * mode_profile(space, lambda.lambda, l, tt) * z[l];
  }
  return acc;
}

PolarGridFunction PoissonField::to_polar() const { return PolarGridFunction{space, t, angles, values}; }

PoissonField poisson_transform_KM(const SpaceParams& space, cplx lambda, const ZonalBoundary& F,
                                  const std::vector<double>& t_grid, int n_theta) {
  require_hyperbolic(space, "poisson_transform_KM");
  if (F.n != space.dim()) throw std::invalid_argument("poisson_transform_KM: boundary dimension mismatch");
  if (F.coeffs.empty()) throw std::invalid_argument("poisson_transform_KM: empty boundary function");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
      throw std::invalid_argument("poisson_transform_KM: t grid must be nonnegative and strictly increasing");
  }
  PoissonField u;
  u.space = space;
  u.lambda = SpectralPoint{lambda, space.rho()};
  u.boundary = F;
  u.t = t_grid;
  u.angles = angular_rule(space.dim(), n_theta);
  const int l_max = static_cast<int>(F.coeffs.size()) - 1;
  u.profiles.assign(l_max + 1, std::vector<cplx>(t_grid.size(), 0.0));
  for (int l = 0; l <= l_max; ++l) {
    if (F.coeffs[l] == cplx(0.0)) continue;
    for (std::size_t i = 0; i < t_grid.size(); ++i) u.profiles[l][i] = mode_profile(space, lambda, l, t_grid[i]);
  }
  const std::size_t nt = u.angles.theta.size();
  std::vector<std::vector<double>> z(nt);
  for (std::size_t j = 0; j < nt; ++j) z[j] = zonal_harmonics(space.dim(), l_max, std::cos(u.angles.theta[j]));
  u.values.assign(t_grid.size() * nt, 0.0);
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      cplx acc = 0.0;
      for (int l = 0; l <= l_max; ++l) acc += F.coeffs[l] * u.profiles[l][i] * z[j][l];
      u.values[i * nt + j] = acc;
    }
  return u;
}

double mode_equation_residual(const SpaceParams& space, cplx lambda, int l, const std::vector<double>& t_points,
                              double h) {
  require_hyperbolic(space, "mode_equation_residual");
  const int n = space.dim();
  const double rho = space.rho();
  const cplx big_lambda = lambda * lambda + rho * rho;
  double worst = 0.0, scale = 0.0;
  for (double t : t_points) {
    if (!(t > h)) throw std::invalid_argument("mode_equation_residual: radii must exceed the step");
    const cplx fm = mode_profile(space, lambda, l, t - h);
    const cplx f0 = mode_profile(space, lambda, l, t);
    const cplx fp = mode_profile(space, lambda, l, t + h);
    const cplx d1 = (fp - fm) / (2.0 * h);
    const cplx d2 = (fp - 2.0 * f0 + fm) / (h * h);
    const double sh = std::sinh(t);
    const cplx res = d2 + (n - 1.0) * numerics::coth(t) * d1 - l * (l + n - 2.0) / (sh * sh) * f0 + big_lambda * f0;
    const double w = std::exp(rho * t);
    worst = std::max(worst, std::abs(res) * w);
    scale = std::max(scale, std::abs(f0) * w);
  }
  if (scale == 0.0) throw NumericalError("mode_equation_residual: profile vanishes on every probe");
  return worst / scale;
}

MeanValueResult mean_value_check(const PoissonField& u, double s, double r, int n_beta) {
  if (!(r >= 0.0) || !(s >= 0.0)) throw std::invalid_argument("mean_value_check: radii must be nonnegative");
  MeanValueResult out;
  const cplx centre = u.evaluate(s, 0.0);
  out.rhs = centre * phi_ode(u.space, u.lambda.lambda, {r})[0];
  if (r == 0.0) {
    out.lhs = centre;
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
  }
  const int n = u.space.dim();
  const auto rule = numerics::gauss_gegenbauer(n_beta, 0.5 * (n - 2));
  double wsum = 0.0;
  cplx acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double x = rule.nodes[k];
    // Point at distance r from a_s in the direction making angle beta with the axis (hyperboloid model).
    const double x0 = std::cosh(s) * std::cosh(r) + std::sinh(s) * std::sinh(r) * x;
    const double x1 = std::sinh(s) * std::cosh(r) + std::cosh(s) * std::sinh(r) * x;
    const double tp = std::acosh(std::max(x0, 1.0));
    const double ct = tp > 1e-12 ? std::clamp(x1 / std::sinh(tp), -1.0, 1.0) : 1.0;
    acc += rule.weights[k] * u.evaluate(tp, std::acos(ct));
    wsum += rule.weights[k];
  }
  out.lhs = acc / wsum;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

SupEnvelope sup_envelope(const PoissonField& u, double q, EnvelopeWeight weight, double p) {
  const auto aq = angular_mean(u.to_polar(), q);
  std::vector<double> w(u.t.size());
  const double rho = u.space.rho();
  if (weight == EnvelopeWeight::ExpRho) {
    for (std::size_t i = 0; i < u.t.size(); ++i) w[i] = std::exp(rho * u.t[i]);
  } else {
    const auto phi = phi_ode(u.space, cplx(0.0, gamma_p(p) * rho), u.t);
    for (std::size_t i = 0; i < u.t.size(); ++i) w[i] = 1.0 / std::abs(phi[i]);
  }
  SupEnvelope out;
  for (std::size_t i = 0; i < u.t.size(); ++i) {
    const double v = w[i] * std::abs(aq.values[i]);
    if (v > out.value) {
      out.value = v;
      out.argmax_t = u.t[i];
    }
  }
  return out;
}

}  // namespace roekit
