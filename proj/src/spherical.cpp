#include "roekit/spherical.hpp"

#include <Eigen/Dense>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

#include "roekit/poisson.hpp"

namespace roekit {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 4>;  // Re w, Im w, Re w', Im w'

// coth(x) - 1 without cancellation.
double coth_minus_one(double x) { return 2.0 / std::expm1(2.0 * x); }

// J'/J - 2 rho: decays like e^{-2r} (symmetric) or e^{-r} (DR) at infinity.
double log_density_excess(const SpaceParams& s, double r) {
  const double a = s.first_multiplicity();
  const double b = s.second_multiplicity();
  if (s.normalization() == Normalization::Symmetric)
    return a * coth_minus_one(r) + 2.0 * b * coth_minus_one(2.0 * r);
  return b * coth_minus_one(r) + 0.5 * a * coth_minus_one(0.5 * r);
}

// Series u = 1 + c2 t^2 + c4 t^4 about the origin.
struct Series {
  cplx c2, c4;
  cplx value(double t) const { return 1.0 + t * t * (c2 + t * t * c4); }
  cplx derivative(double t) const { return t * (2.0 * c2 + 4.0 * t * t * c4); }
};

Series origin_series(const SpaceParams& s, cplx lambda) {
  const cplx big_lambda = lambda * lambda + s.rho() * s.rho();
  const double d = s.dim();
  const double kappa = s.density_log_derivative_linear_term();
  Series out;
  out.c2 = -big_lambda / (2.0 * d);
  out.c4 = -out.c2 * (big_lambda + 2.0 * kappa) / (4.0 * (d + 2.0));
  return out;
}

void validate_grid(const std::vector<double>& t_grid) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0)
      throw std::invalid_argument("phi_ode: grid values must be finite and nonnegative");
    if (i > 0 && t_grid[i] < t_grid[i - 1]) throw std::invalid_argument("phi_ode: grid must be ascending");
  }
}

}  // namespace

std::vector<cplx> phi_ode_scaled(const SpaceParams& space, cplx lambda, const std::vector<double>& t_grid,
                                 const OdeOptions& opt) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw std::invalid_argument("phi_ode: lambda must be finite");
  validate_grid(t_grid);
  const double rho = space.rho();
  const Series series = origin_series(space, lambda);
  const cplx lam2 = lambda * lambda;
  std::vector<cplx> out(t_grid.size());

  std::vector<double> times{opt.t_seed};
  std::vector<std::size_t> owners;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    if (t <= opt.t_seed) {
      out[i] = std::exp(rho * t) * series.value(t);
    } else {
      if (t > times.back()) times.push_back(t);
      owners.push_back(i);
    }
  }
  if (owners.empty()) return out;

  // w = e^{rho t} u satisfies w'' + E w' + (lambda^2 - rho E) w = 0, E = J'/J - 2 rho.
  auto rhs = [&](const State& y, State& dy, double t) {
    const double e = log_density_excess(space, t);
    const cplx w(y[0], y[1]);
    const cplx wp(y[2], y[3]);
    const cplx wpp = -e * wp - (lam2 - rho * e) * w;
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = wpp.real();
    dy[3] = wpp.imag();
  };

  const double t0 = opt.t_seed;
  const cplx scale = std::exp(rho * t0);
  const cplx w0 = scale * series.value(t0);
  const cplx wp0 = scale * (series.derivative(t0) + rho * series.value(t0));
  State y{w0.real(), w0.imag(), wp0.real(), wp0.imag()};

  std::vector<cplx> at_times(times.size());
  std::size_t idx = 0;
  double last_t = t0;
  auto observer = [&](const State& s, double t) {
    at_times[idx++] = cplx(s[0], s[1]);
    last_t = t;
  };
  auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_fehlberg78<State>());
  try {
    odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-3, observer,
                            odeint::max_step_checker(1000000));
  } catch (const std::exception& e) {
    throw NumericalError("phi_ode: integration failed after t = " + std::to_string(last_t) + ": " + e.what());
  }
  for (std::size_t k = 0; k < idx; ++k) {
    if (!std::isfinite(at_times[k].real()) || !std::isfinite(at_times[k].imag()))
      throw NumericalError("phi_ode: non-finite value at t = " + std::to_string(times[k]));
  }

  std::size_t j = 0;
  for (std::size_t i : owners) {
    while (times[j] < t_grid[i]) ++j;
    out[i] = at_times[j];
  }
  return out;
}

std::vector<cplx> phi_ode(const SpaceParams& space, cplx lambda, const std::vector<double>& t_grid,
                          const OdeOptions& opt) {
  auto w = phi_ode_scaled(space, lambda, t_grid, opt);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= std::exp(-space.rho() * t_grid[i]);
  return w;
}

cplx phi_n_integral(const SpaceParams& space, cplx lambda, double t, const NIntegralOptions& opt) {
  if (space.normalization() != Normalization::DamekRicci)
    throw std::invalid_argument("phi_n_integral: requires a space in DR normalization");
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()) || !std::isfinite(t))
    throw std::invalid_argument("phi_n_integral: arguments must be finite");
  const int m = space.first_multiplicity();
  const int l = space.second_multiplicity();
  const double Q = space.Q();
  const double C = normalize_C(space);
  const double logC = std::log(C);
  const cplx alpha1 = 0.5 - cplx(0.0, 1.0) * lambda / Q;
  const cplx alpha2 = 0.5 + cplx(0.0, 1.0) * lambda / Q;
  const double re1 = alpha1.real();
  if (re1 < 0.0 || re1 > 1.0)
    throw std::invalid_argument("phi_n_integral: |Im lambda| must not exceed rho");
  const double log_a = t;

  // Inner variable v = log s; the integrand decays like e^{-Q|v|} off [min(0,t), max(0,t)].
  const double lo_core = std::min(0.0, t);
  const double hi_core = std::max(0.0, t);
  const double sphere_const =
      std::pow(2.0, m - 1) * numerics::sphere_area(m) * (l > 0 ? numerics::sphere_area(l) : 1.0);
  double v0 = 8.0;
  auto tail_bound = [&](double pad) {
    const double up = std::exp(logC + Q * re1 * log_a - Q * (hi_core + pad)) / Q;
    const double down = std::exp(logC - Q * re1 * log_a + Q * (lo_core - pad)) / Q;
    return sphere_const * 0.5 * numerics::pi * (up + down);
  };
  while (tail_bound(v0) > opt.tail_tol && v0 < 200.0) v0 += 2.0;
  if (tail_bound(v0) > opt.tail_tol)
    throw NumericalError("phi_n_integral: tail bound exceeds tolerance");
  std::vector<double> vbreaks;
  for (double v = lo_core - v0; v < hi_core + v0; v += 1.0) vbreaks.push_back(v);
  vbreaks.push_back(hi_core + v0);

  numerics::QuadOptions qopt;
  qopt.abs_tol = opt.tail_tol;
  qopt.rel_tol = opt.rel_tol;

  if (l == 0) {
    // 1-D integral over u = |X|^2/4 = e^v: 2^{m-1}|S^{m-1}| u^{m/2-1} du, P = C a^Q (a+u)^{-2Q}.
    auto f = [&](double v) {
      const double u = std::exp(v);
      const double log_pa = logC + Q * log_a - 2.0 * Q * std::log(std::exp(log_a) + u);
      const double log_p1 = logC - 2.0 * Q * std::log1p(u);
      return std::exp(alpha1 * log_pa + alpha2 * log_p1 + 0.5 * m * v);
    };
    auto r = numerics::integrate_or_throw(f, vbreaks, qopt, "phi_n_integral");
    return sphere_const * r.value;
  }

  // Polar (s, psi) in the (u, |Y|) quarter plane.
  const double a = std::exp(log_a);
  auto inner = [&](double psi) {
    const double c = std::cos(psi);
    const double angular = std::pow(c, 0.5 * m - 1.0) * std::pow(std::sin(psi), l - 1);
    if (angular == 0.0) return cplx(0.0);
    auto g = [&](double v) {
      const double s = std::exp(v);
      const double log_pa = logC + Q * log_a - Q * std::log(a * a + 2.0 * a * s * c + s * s);
      const double log_p1 = logC - Q * std::log(1.0 + 2.0 * s * c + s * s);
      return std::exp(alpha1 * log_pa + alpha2 * log_p1 + Q * v);
    };
    auto r = numerics::integrate_or_throw(g, vbreaks, qopt, "phi_n_integral (radial)");
    return angular * r.value;
  };
  const std::array<double, 5> psi_breaks{0.0, 0.25 * numerics::pi * 0.5, 0.5 * numerics::pi * 0.5,
                                         0.75 * numerics::pi * 0.5, 0.5 * numerics::pi};
  auto r = numerics::integrate_or_throw(inner, psi_breaks, qopt, "phi_n_integral (angular)");
  return sphere_const * r.value;
}

CFit fit_c(const SpaceParams& space, double lambda, const CFitOptions& opt) {
  if (!std::isfinite(lambda) || lambda == 0.0) throw std::invalid_argument("fit_c: lambda must be real and nonzero");
  if (opt.t0 < 1.0) throw std::invalid_argument("fit_c: window must start at t >= 1");
  if (opt.correction_orders < 0) throw std::invalid_argument("fit_c: correction_orders must be nonnegative");
  const double lam = std::abs(lambda);
  const double four_periods = 8.0 * numerics::pi / lam;
  const double t0 = opt.t0;
  const double t1 = opt.t1 > t0 ? opt.t1 : t0 + std::max(8.0, four_periods);
  if (t1 - t0 < four_periods * (1.0 - 1e-12))
    throw std::invalid_argument("fit_c: window shorter than four oscillation periods (need length >= " +
                                std::to_string(four_periods) + ")");
  if (opt.decay_t1 <= opt.decay_t0) throw std::invalid_argument("fit_c: empty decay window");

  const double beta = space.normalization() == Normalization::Symmetric ? 2.0 : 1.0;
  const double h = std::min(0.02, 2.0 * numerics::pi / lam / 50.0);
  const auto grid = numerics::arange_inclusive(t0, t1, h);
  const auto psi = phi_ode_scaled(space, lambda, grid);

  const int K = opt.correction_orders;
  const int cols = 2 * (K + 1);
  const auto rows = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXcd A(rows, cols);
  Eigen::VectorXcd b(rows);
  const cplx I(0.0, 1.0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double t = grid[i];
    for (int k = 0; k <= K; ++k) {
      const double damp = std::exp(-k * beta * (t - t0));
      A(i, 2 * k) = damp * std::exp(I * lambda * t);
      A(i, 2 * k + 1) = damp * std::exp(-I * lambda * t);
    }
    b(i) = psi[i];
  }
  Eigen::VectorXd col_scale(cols);
  for (int j = 0; j < cols; ++j) {
    col_scale(j) = A.col(j).norm();
    A.col(j) /= col_scale(j);
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond <= opt.max_condition))
    throw NumericalError("fit_c: ill-conditioned fit (condition number " + std::to_string(cond) +
                         "); lambda too small for the window");
  Eigen::VectorXcd x = svd.solve(b);
  for (int j = 0; j < cols; ++j) x(j) /= col_scale(j);

  CFit fit;
  fit.lambda = lambda;
  fit.c_plus = x(0);
  fit.c_minus = x(1);
  fit.fit_window = {t0, t1};
  fit.decay_window = {opt.decay_t0, opt.decay_t1};
  fit.condition = cond;
  fit.correction_orders = K;

  // Noise floor of the full model on the fit window.
  const Eigen::VectorXcd full_res = b - A * (x.cwiseProduct(col_scale.cast<cplx>()));
  const double rms = full_res.norm() / std::sqrt(static_cast<double>(rows));

  const auto dgrid = numerics::arange_inclusive(opt.decay_t0, opt.decay_t1, h);
  const auto dpsi = phi_ode_scaled(space, lambda, dgrid);
  std::vector<double> centres, logs;
  const int bins = static_cast<int>(std::floor(opt.decay_t1 - opt.decay_t0 + 1e-9));
  for (int bin = 0; bin < bins; ++bin) {
    const double lo = opt.decay_t0 + bin;
    const double hi = lo + 1.0;
    double mx = 0.0;
    for (std::size_t i = 0; i < dgrid.size(); ++i) {
      if (dgrid[i] < lo || dgrid[i] > hi) continue;
      const double t = dgrid[i];
      const cplx e = dpsi[i] - fit.c_plus * std::exp(I * lambda * t) - fit.c_minus * std::exp(-I * lambda * t);
      mx = std::max(mx, std::abs(e));
    }
    if (mx > 100.0 * rms && mx > 0.0) {
      centres.push_back(0.5 * (lo + hi));
      logs.push_back(std::log(mx));
    }
  }
  if (centres.size() < 3)
    throw NumericalError("fit_c: fewer than three residual bins above the noise floor in the decay window");
  double mc = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < centres.size(); ++i) {
    mc += centres[i];
    ml += logs[i];
  }
  mc /= centres.size();
  ml /= centres.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < centres.size(); ++i) {
    sxy += (centres[i] - mc) * (logs[i] - ml);
    sxx += (centres[i] - mc) * (centres[i] - mc);
  }
  fit.residual_decay_rate = sxy / sxx;
  return fit;
}

EnvelopeRatio envelope_check(const SpaceParams& space, double p, double alpha, double t_lo, double t_hi, double h) {
  if (!(t_lo >= 1.0 && t_hi > t_lo)) throw std::invalid_argument("envelope_check: need 1 <= t_lo < t_hi");
  const double g = gamma_p(p);
  const double rho = space.rho();
  const cplx lambda(alpha, g * rho);
  const auto grid = numerics::arange_inclusive(t_lo, t_hi, h);
  // e^{rho t} phi is computed directly, so e^{rho(1-g)t}|phi| = e^{-g rho t}|w|.
  const auto w = phi_ode_scaled(space, lambda, grid);
  const bool log_corrected = p == 2.0 && alpha == 0.0;
  EnvelopeRatio out{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double r = std::abs(w[i]) * std::exp(-g * rho * grid[i]);
    if (log_corrected) r /= 1.0 + grid[i];
    out.ratio_min = std::min(out.ratio_min, r);
    out.ratio_max = std::max(out.ratio_max, r);
  }
  return out;
}

}  // namespace roekit
