// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "roekit/lorentz.hpp"
#include "roekit/poisson.hpp"
#include "roekit/roe.hpp"
#include "roekit/spectrum.hpp"
#include "roekit/spherical.hpp"

using namespace roekit;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. ODE route against sin(lambda t)/(lambda sinh t) on H^3.
Outcome closed_form_h3() {
  const auto t0 = Clock::now();
  const auto h3 = parse_space("H3");
  const auto grid = numerics::arange_inclusive(0.1, 10.0, 0.1);
  double worst = 0.0;
  for (double lam : {0.5, 1.0, 2.0}) {
    const auto phi = phi_ode(h3, lam, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const cplx exact = oracle::h3_phi(lam, grid[i]);
      worst = std::max(worst, std::abs(phi[i] - exact) / std::abs(exact));
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-6 && elapsed < 5.0,
          "max rel err " + fmt("%.3e", worst) + " (<= 1e-6), " + fmt("%.3f", elapsed) + " s (< 5 s)"};
}

// 2. phi_{-i rho} = 1 and phi(e) = 1 on three spaces.
Outcome normalization_identities() {
  double worst_const = 0.0, worst_origin = 0.0;
  const auto grid = numerics::arange_inclusive(0.0, 20.0, 0.1);
  for (const char* spec : {"H3", "sym:3,0", "dr:2,1"}) {
    const auto s = parse_space(spec);
    const auto phi = phi_ode(s, cplx(0.0, -s.rho()), grid);
    for (const auto& v : phi) worst_const = std::max(worst_const, std::abs(v - 1.0));
    for (cplx lam : {cplx(0.0), cplx(0.7), cplx(1.0, 0.2), cplx(2.0), cplx(0.0, 0.5 * s.rho())})
      worst_origin = std::max(worst_origin, std::abs(phi_ode(s, lam, {0.0})[0] - 1.0));
  }
  const auto dr = parse_space("dr:2,1");
  for (double t : {0.0, 1.0, 3.0})
    worst_const = std::max(worst_const, std::abs(phi_n_integral(dr, cplx(0.0, -dr.rho()), t) - 1.0));
  const bool ok = worst_const <= 1e-8 && worst_origin <= 1e-8;
  return {ok, "max |phi_{-i rho} - 1| " + fmt("%.3e", worst_const) + ", max |phi(e) - 1| " + fmt("%.3e", worst_origin)};
}

// 3. N-integral against the ODE on DR(2,1); Poisson mass.
Outcome cross_engine() {
  const auto dr = parse_space("dr:2,1");
  const auto grid = numerics::arange_inclusive(0.1, 8.0, 0.1);
  double worst = 0.0;
  for (cplx lam : {cplx(0.0), cplx(0.7), cplx(0.0, 0.3 * dr.rho())}) {
    const auto ode = phi_ode(dr, lam, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      worst = std::max(worst, std::abs(phi_n_integral(dr, lam, grid[i]) - ode[i]));
  }
  const double C = normalize_C(dr);
  double mass_err = 0.0;
  for (double t : {-1.0, 0.0, 1.0, 2.5}) mass_err = std::max(mass_err, std::abs(poisson_mass(dr, t, C) - 1.0));
  return {worst <= 1e-4 && mass_err <= 1e-6,
          "max |N-integral - ODE| " + fmt("%.3e", worst) + " (<= 1e-4), max |mass - 1| " + fmt("%.3e", mass_err)};
}

// 4. Coefficient fit on H^3 at lambda = 1.
Outcome c_fit() {
  const auto fit = fit_c(parse_space("H3"), 1.0);
  const double mod_err = std::abs(std::abs(fit.c_plus) - 1.0);
  const double conj_err = std::abs(fit.c_minus - std::conj(fit.c_plus));
  const bool ok = mod_err <= 0.01 && fit.residual_decay_rate <= -1.8 && conj_err <= 1e-6;
  return {ok, "||c(1)| - 1| " + fmt("%.3e", mod_err) + ", decay rate " + fmt("%.3f", fit.residual_decay_rate) +
                  ", |c_- - conj c_+| " + fmt("%.3e", conj_err)};
}

// 5. M_2(phi_lambda) * lambda independent of lambda on H^3.
Outcome ball_average_identity() {
  const auto t0 = Clock::now();
  const auto h3 = parse_space("H3");
  const auto grid = numerics::arange_inclusive(0.0, 200.0, 0.01);
  std::vector<double> schedule;
  for (double R = 10.0; R <= 200.0 + 1e-9; R += 10.0) schedule.push_back(R);
  double lo = 1e300, hi = 0.0;
  for (double lam : {0.5, 1.0, 2.0}) {
    RadialGridFunction f{h3, grid, phi_ode(h3, lam, grid)};
    const double v = m_p(f, 2.0, schedule).value * lam;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double spread = hi / lo - 1.0;
  const double elapsed = seconds_since(t0);
  return {spread <= 0.02 && elapsed < 30.0,
          "relative spread of M2*lambda " + fmt("%.3e", spread) + " (<= 0.02), " + fmt("%.2f", elapsed) + " s (< 30 s)"};
}

// 6. Growth of truncated norms of phi_0 and phi_1 on H^3.
Outcome divergence_suite() {
  const auto h3 = parse_space("H3");
  const auto grid = numerics::arange_inclusive(0.0, 40.0, 0.01);
  RadialGridFunction phi0{h3, grid, phi_ode(h3, 0.0, grid)};
  RadialGridFunction phi1{h3, grid, phi_ode(h3, 1.0, grid)};
  const double w10 = lorentz_norm(phi0, 2.0, kInf, 10.0).value;
  const double w40 = lorentz_norm(phi0, 2.0, kInf, 40.0).value;
  const double s22 = lorentz_norm(phi1, 2.0, 2.0, 40.0).tail_slope;
  const double s2w = lorentz_norm(phi1, 2.0, kInf, 40.0).tail_slope;
  const bool ok = w40 >= 1.2 * w10 && std::abs(s22 - 0.5) <= 0.1 && s2w <= 0.05;
  return {ok, "phi0 weak-2 growth x" + fmt("%.3f", w40 / w10) + ", phi1 (2,2) slope " + fmt("%.3f", s22) +
                  ", phi1 weak-2 slope " + fmt("%.4f", s2w)};
}

// 7. Counterexample pair stays bounded without being an eigenfunction; the
// one-sided pair blows up under negative powers.
Outcome sharpness() {
  const auto h3 = parse_space("H3");
  const auto pair = counterexample_pair(h3, 1.5, 1.0);
  RoeConfig cfg;
  cfg.kind = NormKind::WeakPPrime;
  cfg.p_prime = conjugate_exponent(1.5);
  cfg.k_min = 0;
  cfg.k_max = 20;
  const auto rep = roe_verify(pair.f, std::abs(pair.target), cfg);
  double factor = 1.0;
  for (double v : rep.per_k_values)
    factor = std::max({factor, v / rep.per_k_values.front(), rep.per_k_values.front() / v});

  RoeConfig back;
  back.kind = NormKind::WeakPPrime;
  back.p_prime = 2.0;
  back.k_min = -10;
  back.k_max = 0;
  const double alpha = 1.0;
  const auto rep2 = roe_verify(one_sided_pair(h3, alpha), alpha * alpha + h3.rho() * h3.rho(), back);
  const double growth = rep2.per_k_values.front() / rep2.per_k_values[rep2.per_k_values.size() - 2];
  const bool ok = factor <= 3.0 && rep.eigen_residual >= 0.1 && growth >= 10.0;
  return {ok, "per-k factor " + fmt("%.3f", factor) + " (<= 3), residual " + fmt("%.3f", rep.eigen_residual) +
                  " (>= 0.1), verdict " + to_string(rep.verdict) + ", backward growth x" + fmt("%.1f", growth)};
}

// 8. Minimal modulus on the spectrum and nesting of the regions.
Outcome threshold_geometry() {
  const auto h3 = parse_space("H3");
  const double rho2 = h3.rho() * h3.rho();
  const double e2 = std::abs(min_modulus_on_spectrum_grid(h3, 2.0) - rho2);
  const double e15 = std::abs(min_modulus_on_spectrum_grid(h3, 1.5) - 4.0 * rho2 / (1.5 * 3.0));
  int nested = 0, total = 0;
  for (auto [p, q] : {std::pair{1.2, 1.5}, std::pair{1.5, 2.0}, std::pair{1.2, 2.0}}) {
    for (double a : numerics::linspace(-5.0, 5.0, 100)) {
      ++total;
      if (spectrum_contains(h3, p, spectrum_boundary_point(h3, q, a))) ++nested;
    }
  }
  const bool ok = e2 <= 1e-8 && e15 <= 1e-8 && nested == total;
  return {ok, "grid min error p=2 " + fmt("%.2e", e2) + ", p=1.5 " + fmt("%.2e", e15) + ", nested " +
                  std::to_string(nested) + "/" + std::to_string(total)};
}

// 9. Compact-picture Poisson transform on H^3.
Outcome poisson_eigen() {
  const auto h3 = parse_space("H3");
  const auto grid = numerics::arange_inclusive(0.0, 10.0, 0.25);
  double worst = 0.0;
  for (cplx lam : {cplx(1.0), cplx(0.5, 0.2), cplx(0.0)}) {
    const ZonalBoundary one{3, {1.0}};
    const auto u = poisson_transform_KM(h3, lam, one, grid);
    const auto phi = phi_ode(h3, lam, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < u.angles.theta.size(); ++j)
        worst = std::max(worst, std::abs(u.values[i * u.angles.theta.size() + j] - phi[i]));
  }
  const auto probes = numerics::arange_inclusive(0.5, 8.0, 0.25);
  const double mode_res = mode_equation_residual(h3, 1.0, 1, probes);
  const ZonalBoundary cosine{3, {0.0, 1.0}};
  const auto u = poisson_transform_KM(h3, 1.0, cosine, {0.0, 1.0});
  double mv = 0.0;
  for (auto [s, r] : {std::pair{1.0, 0.5}, std::pair{0.5, 1.2}, std::pair{2.0, 0.8}})
    mv = std::max(mv, mean_value_check(u, s, r).residual);
  const bool ok = worst <= 1e-5 && mode_res <= 1e-4 && mv <= 1e-4;
  return {ok, "|P 1 - phi| " + fmt("%.2e", worst) + ", l=1 mode residual " + fmt("%.2e", mode_res) +
                  ", mean-value residual " + fmt("%.2e", mv)};
}

// 10. Euclidean baseline classifications.
Outcome euclid() {
  EuclidConfig two;
  two.k_min = -10;
  two.k_max = 10;
  const auto a = euclid_roe_demo(1.0, {{1.0, 1.0, 0.0}}, two);
  EuclidConfig back;
  back.k_min = -10;
  back.k_max = 0;
  const auto b = euclid_roe_demo(1.0, {{1.0, 1.0, 0.0}, {1.0, 0.5, 0.0}}, back);
  EuclidConfig fwd;
  fwd.k_min = 0;
  fwd.k_max = 10;
  const auto c = euclid_roe_demo(1.0, {{1.0, 1.0, 0.0}, {1.0, 2.0, 0.0}}, fwd);
  const bool ok =
      a.verdict == Verdict::Eigenfunction && b.verdict == Verdict::Unbounded && c.verdict == Verdict::Unbounded;
  return {ok, std::string("sin x: ") + to_string(a.verdict) + ", sin x + sin(x/2) backward: " + to_string(b.verdict) +
                  ", sin x + sin 2x forward: " + to_string(c.verdict)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"H3 closed form", closed_form_h3},
      {"normalization identities", normalization_identities},
      {"cross-engine agreement", cross_engine},
      {"coefficient fit", c_fit},
      {"ball-average identity", ball_average_identity},
      {"divergence suite", divergence_suite},
      {"sharpness suite", sharpness},
      {"threshold geometry", threshold_geometry},
      {"Poisson eigen-check", poisson_eigen},
      {"Euclidean baseline", euclid},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
