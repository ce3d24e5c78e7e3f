#pragma once

// Independent reference values for the tests. Nothing here calls the code
// under test except generic quadrature.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.141592653589793238462643383279502884;

/// phi_lambda(a_t) on H^3: sin(lambda t) / (lambda sinh t).
inline cplx h3_phi(cplx lambda, double t) {
  if (t == 0.0) return 1.0;
  if (lambda == cplx(0.0)) return t / std::sinh(t);
  return std::sin(lambda * t) / (lambda * std::sinh(t));
}

/// Root of a sign-changing continuous function on [a, b].
inline double bisect(const std::function<double(double)>& f, double a, double b, int iters = 200) {
  double fa = f(a);
  for (int i = 0; i < iters; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// Mass of the DR Poisson kernel with C = 1 in closed form: the |Y| and
/// |X|^2/4 integrals are Beta integrals.
inline double dr_poisson_mass_unit_C(int m, int l) {
  auto sphere = [](int k) { return 2.0 * std::pow(pi, 0.5 * k) / std::tgamma(0.5 * k); };
  auto beta = [](double a, double b) { return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b); };
  const double Q = 0.5 * m + l;
  // Y-integral leaves (1 + |X|^2/4)^{l - 2Q}; then u = |X|^2/4.
  double mass = std::pow(2.0, m - 1) * sphere(m) * beta(0.5 * m, 0.5 * m + l);
  if (l > 0) mass *= sphere(l) * 0.5 * beta(0.5 * l, Q - 0.5 * l);
  return mass;
}

/// Classical RK4 for the l-th zonal mode equation on H^n,
/// Phi'' + (n-1) coth t Phi' - l(l+n-2)/sinh^2 t Phi = -Lambda Phi,
/// started from the regular Frobenius branch t^l (1 + b t^2). Returns Phi on
/// the requested ascending radii (unnormalized).
inline std::vector<cplx> mode_ode(int n, int l, cplx big_lambda, const std::vector<double>& ts, double h = 1e-4) {
  const double t0 = 1e-3;
  const cplx b = -(big_lambda + l * (l + 2.0 * n - 3.0) / 3.0) / (4.0 * l + 2.0 * n);
  cplx y = std::pow(t0, l) * (1.0 + b * t0 * t0);
  cplx yp = l * std::pow(t0, l - 1) + (l + 2.0) * b * std::pow(t0, l + 1);
  auto acc = [&](double t, cplx u, cplx up) {
    const double s = std::sinh(t);
    return -(n - 1.0) * std::cosh(t) / s * up + l * (l + n - 2.0) / (s * s) * u - big_lambda * u;
  };
  std::vector<cplx> out;
  double t = t0;
  for (double target : ts) {
    while (t < target - 1e-14) {
      const double step = std::min(h, target - t);
      const cplx k1y = yp, k1v = acc(t, y, yp);
      const cplx k2y = yp + 0.5 * step * k1v, k2v = acc(t + 0.5 * step, y + 0.5 * step * k1y, k2y);
      const cplx k3y = yp + 0.5 * step * k2v, k3v = acc(t + 0.5 * step, y + 0.5 * step * k2y, k3y);
      const cplx k4y = yp + step * k3v, k4v = acc(t + step, y + step * k3y, k4y);
      y += step / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      yp += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      t += step;
    }
    out.push_back(y);
  }
  return out;
}

/// Deterministic pseudo-random stream (SplitMix64) for property tests.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform(double a, double b) { return a + (b - a) * (next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace oracle
