#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "roekit/lorentz.hpp"
#include "roekit/spherical.hpp"

using namespace roekit;
using doctest::Approx;

namespace {

RadialGridFunction tabulate(const SpaceParams& s, double r_max, double h, const std::function<cplx(double)>& f) {
  RadialGridFunction out{s, numerics::arange_inclusive(0.0, r_max, h), {}};
  for (double r : out.r) out.values.push_back(f(r));
  return out;
}

RadialGridFunction phi(const SpaceParams& s, cplx lam, double r_max, double h = 0.01) {
  RadialGridFunction out{s, numerics::arange_inclusive(0.0, r_max, h), {}};
  out.values = phi_ode(s, lam, out.r);
  return out;
}

}  // namespace

TEST_CASE("grid validation") {
  const auto h3 = parse_space("H3");
  CHECK_THROWS_AS(RadialGridFunction({h3, {0.0, 0.0, 1.0}, {1, 1, 1}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(RadialGridFunction({h3, {0.0, 1.0}, {1.0}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(RadialGridFunction({h3, {0.0, 1.0}, {1.0, cplx(INFINITY)}}).validate(), std::invalid_argument);
}

TEST_CASE("distribution function of an indicator and of phi_0") {
  const auto h3 = parse_space("H3");
  const auto one = tabulate(h3, 10.0, 0.01, [](double) { return 1.0; });
  CHECK(distribution_function(one, 0.5, 3.0) == Approx(ball_volume(h3, 3.0)).epsilon(1e-10));
  CHECK(distribution_function(one, 1.5, 3.0) == 0.0);

  const auto p0 = phi(h3, 0.0, 40.0);
  const double t = oracle::bisect([](double r) { return r / std::sinh(r) - 0.1; }, 1.0, 10.0);
  CHECK(distribution_function(p0, 0.1) == Approx(ball_volume(h3, t)).epsilon(1e-6));
}

TEST_CASE("distribution function is nonincreasing and rearrangement inverts it") {
  const auto h3 = parse_space("H3");
  const auto f = phi(h3, 1.3, 30.0);
  double prev = kInf;
  for (double s = 1e-6; s < 1.0; s *= 1.7) {
    const double d = distribution_function(f, s);
    CHECK(d <= prev);
    prev = d;
  }
  oracle::Stream rng(21);
  for (int i = 0; i < 30; ++i) {
    const double t = std::exp(rng.uniform(-8.0, 20.0));
    const double fs = rearrangement(f, t);
    CHECK(distribution_function(f, fs) <= t * (1 + 1e-9));
  }
}

TEST_CASE("rearrangement of an indicator, and homogeneity") {
  const auto h3 = parse_space("H3");
  const auto one = tabulate(h3, 10.0, 0.01, [](double) { return 1.0; });
  const double V = ball_volume(h3, 2.0);
  CHECK(rearrangement(one, 0.5 * V, 2.0) == Approx(1.0).epsilon(1e-9));
  CHECK(rearrangement(one, 1.01 * V, 2.0) == Approx(0.0).epsilon(1e-9));

  const auto f = phi(h3, 0.7, 20.0);
  auto f2 = f;
  for (auto& v : f2.values) v *= 2.0;
  double prev = kInf;
  for (double t : {1e-3, 0.1, 1.0, 10.0, 1e3, 1e6}) {
    CHECK(rearrangement(f2, t) == Approx(2.0 * rearrangement(f, t)).epsilon(1e-9));
    CHECK(rearrangement(f, t) <= prev);
    prev = rearrangement(f, t);
  }
}

TEST_CASE("rearrangement of phi_0 follows the envelope e^{-rho u}(1+u)") {
  const auto h3 = parse_space("H3");
  const auto p0 = phi(h3, 0.0, 40.0);
  double lo = kInf, hi = 0.0;
  for (double u = 1.0; u <= 10.0; u += 0.5) {
    const double ratio = rearrangement(p0, std::exp(2.0 * u)) / (std::exp(-u) * (1.0 + u));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo < 5.0);
}

TEST_CASE("Lorentz norms of an indicator") {
  const auto h3 = parse_space("H3");
  const auto one = tabulate(h3, 10.0, 0.01, [](double) { return 1.0; });
  const double V = ball_volume(h3, 4.0);
  for (double p : {1.5, 2.0, 3.0}) {
    CHECK(lorentz_norm(one, p, kInf, 4.0).value == Approx(std::pow(V, 1.0 / p)).epsilon(1e-9));
    CHECK(lorentz_norm(one, p, 1.0, 4.0).value == Approx(std::pow(V, 1.0 / p)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(lorentz_norm(one, 2.0, 0.5, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(lorentz_norm(one, 1.0, 2.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(lorentz_norm(one, 2.0, 2.0, 11.0), std::invalid_argument);
}

TEST_CASE("Lorentz norms nest in q") {
  oracle::Stream rng(4);
  for (const char* spec : {"H3", "dr:2,1"}) {
    const auto s = parse_space(spec);
    for (int i = 0; i < 4; ++i) {
      const auto f = phi(s, cplx(rng.uniform(0.2, 3.0), rng.uniform(0.0, 0.5) * s.rho()), 20.0);
      const double p = rng.uniform(1.2, 4.0);
      double prev = kInf;
      for (double q : {1.0, 1.5, 2.0, 4.0, kInf}) {
        const double v = lorentz_norm(f, p, q, 20.0).value;
        CHECK(v <= prev * (1 + 1e-9));
        prev = v;
      }
    }
  }
}

TEST_CASE("L^{p,p} by rearrangement equals the direct L^p norm") {
  oracle::Stream rng(8);
  const auto h3 = parse_space("H3");
  for (int i = 0; i < 6; ++i) {
    const double a = rng.uniform(0.3, 2.0);
    const auto f = tabulate(h3, 15.0, 0.01, [a](double r) { return std::exp(-a * r * r) * (1.0 + std::cos(r)); });
    const double p = rng.uniform(1.2, 4.0);
    CHECK(lorentz_norm(f, p, p, 15.0).value == Approx(lp_norm(f, p, 15.0)).epsilon(1e-4));
  }
}

TEST_CASE("truncated norms are nondecreasing in R") {
  const auto f = phi(parse_space("H3"), 1.0, 40.0);
  for (double q : {1.0, 2.0, kInf}) {
    double prev = 0.0;
    for (double R = 2.0; R <= 40.0; R += 2.0) {
      const double v = lorentz_norm(f, 2.0, q, R).value;
      CHECK(v >= prev * (1 - 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("m_p functional") {
  const auto h3 = parse_space("H3");
  std::vector<double> schedule;
  for (double R = 10.0; R <= 100.0; R += 10.0) schedule.push_back(R);
  const auto bump = tabulate(h3, 100.0, 0.01, [](double r) { return r < 3.0 ? 1.0 : 0.0; });
  const auto mb = m_p(bump, 2.0, schedule);
  CHECK(mb.sequence.back().second < mb.sequence.front().second);
  CHECK(mb.tail_slope == Approx(-0.5).epsilon(0.02));

  // p = 2 ball averages of phi_1 settle; q < 2 strip functions diverge.
  const auto f1 = phi(h3, 1.0, 100.0);
  CHECK(std::abs(m_p(f1, 2.0, schedule).tail_slope) < 0.05);
  const auto fq = phi(h3, cplx(0.0, gamma_p(1.5)), 100.0);
  CHECK(m_p(fq, 2.0, schedule).tail_slope > 0.5);
}

TEST_CASE("radialize and angular means") {
  const auto h3 = parse_space("H3");
  const auto f = phi(h3, 0.9, 10.0, 0.05);
  const auto polar = to_polar(f, 12);
  const auto back = radialize(polar);
  for (std::size_t i = 0; i < f.r.size(); ++i) CHECK(std::abs(back.values[i] - f.values[i]) < 1e-13);

  PolarGridFunction odd{h3, f.r, angular_rule(3, 12), {}};
  for (double r : f.r)
    for (double th : odd.angles.theta) odd.values.push_back(std::cos(th) * std::exp(-r));
  for (const auto& v : radialize(odd).values) CHECK(std::abs(v) < 1e-13);

  // Contraction of the radial average for several Lorentz indices.
  PolarGridFunction mixed = odd;
  for (std::size_t i = 0; i < f.r.size(); ++i)
    for (std::size_t j = 0; j < odd.angles.theta.size(); ++j)
      mixed.values[i * odd.angles.theta.size() + j] = f.values[i] * (1.0 + 0.8 * std::cos(odd.angles.theta[j]));
  for (auto [p, q] : {std::pair{2.0, 2.0}, std::pair{1.5, kInf}, std::pair{3.0, 1.0}})
    CHECK(lorentz_norm(radialize(mixed), p, q, 10.0).value <= lorentz_norm(mixed, p, q, 10.0).value * (1 + 1e-9));
}

TEST_CASE("a_pq on radial and separable inputs") {
  const auto h3 = parse_space("H3");
  const auto f = phi(h3, 1.1, 20.0, 0.02);
  const auto polar = to_polar(f, 16);
  CHECK(a_pq(polar, 2.0, 2.0, 20.0).value == Approx(lorentz_norm(f, 2.0, kInf, 20.0).value).epsilon(1e-12));

  const auto rule = angular_rule(3, 16);
  const double q = 3.0;
  double mass = 0.0;
  for (std::size_t j = 0; j < rule.theta.size(); ++j) mass += rule.weights[j] * std::pow(2.0 + std::cos(rule.theta[j]), q);
  const double c = std::pow(mass, -1.0 / q);
  PolarGridFunction sep{h3, f.r, rule, {}};
  for (std::size_t i = 0; i < f.r.size(); ++i)
    for (double th : rule.theta) sep.values.push_back(f.values[i] * c * (2.0 + std::cos(th)));
  CHECK(a_pq(sep, 2.0, q, 20.0).value == Approx(lorentz_norm(f, 2.0, kInf, 20.0).value).epsilon(1e-10));
}

TEST_CASE("angular rule") {
  for (int d : {2, 3, 5}) {
    const auto rule = angular_rule(d, 10);
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    CHECK(sum == Approx(1.0).epsilon(1e-14));
    for (std::size_t j = 1; j < rule.theta.size(); ++j) CHECK(rule.theta[j] > rule.theta[j - 1]);
  }
}
