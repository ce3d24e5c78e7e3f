#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "roekit/roe.hpp"
#include "roekit/spectrum.hpp"

using namespace roekit;
using doctest::Approx;

namespace {

EigenCombination single(const SpaceParams& s, cplx lambda, cplx coeff = 1.0) { return {s, {{coeff, lambda}}}; }

}  // namespace

TEST_CASE("laplacian_power acts diagonally") {
  const auto h3 = parse_space("H3");
  const cplx lam(0.7, 0.2);
  const auto f = single(h3, lam);
  CHECK(laplacian_power(f, 0).terms[0].coeff == cplx(1.0));
  const cplx L = eigenvalue_of(h3, lam);
  CHECK(std::abs(laplacian_power(f, 3).terms[0].coeff - L * L * L) < 1e-14);
  CHECK(std::abs(laplacian_power(f, -2).terms[0].coeff - 1.0 / (L * L)) < 1e-14);
  CHECK_THROWS_AS(laplacian_power(single(h3, cplx(0.0, 1.0)), -1), std::domain_error);
}

TEST_CASE("laplacian_power composes exactly") {
  oracle::Stream rng(14);
  const auto s = parse_space("dr:2,1");
  for (int trial = 0; trial < 20; ++trial) {
    EigenCombination f{s, {}};
    for (int i = 0; i < 3; ++i)
      f.terms.push_back({cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)), cplx(rng.uniform(0, 2), rng.uniform(-0.5, 0.5))});
    const int j = static_cast<int>(rng.next() % 11) - 5, k = static_cast<int>(rng.next() % 11) - 5;
    const auto a = laplacian_power(laplacian_power(f, j), k), b = laplacian_power(f, j + k);
    for (std::size_t i = 0; i < f.terms.size(); ++i)
      CHECK(std::abs(a.terms[i].coeff - b.terms[i].coeff) <= 1e-12 * std::abs(b.terms[i].coeff));
  }
}

TEST_CASE("counterexample powers keep equal moduli") {
  const auto h3 = parse_space("H3");
  const auto pair = counterexample_pair(h3, 1.5, 1.0);
  const double T = std::abs(pair.target);
  for (int k = 0; k <= 20; ++k) {
    const auto g = laplacian_power(pair.f, k);
    for (const auto& t : g.terms) CHECK(std::abs(t.coeff) == Approx(std::pow(T, k)).epsilon(1e-12));
  }
}

TEST_CASE("eigen_residual") {
  const auto h3 = parse_space("H3");
  const auto grid = numerics::arange_inclusive(0.0, 20.0, 0.05);
  const auto f = single(h3, 1.3);
  CHECK(eigen_residual(f, eigenvalue_of(h3, 1.3), grid) <= 1e-8);
  const auto pair = counterexample_pair(h3, 1.5, 1.0);
  const double r1 = eigen_residual(pair.f, pair.target, grid);
  CHECK(r1 >= 0.1);
  auto scaled = pair.f;
  for (auto& t : scaled.terms) t.coeff *= 5.0;
  CHECK(eigen_residual(scaled, pair.target, grid) == Approx(r1).epsilon(1e-12));
  CHECK_THROWS(eigen_residual(single(h3, 1.0, 0.0), -2.0, grid));
}

TEST_CASE("spherical functions on the real line are Roe eigenfunctions") {
  const auto h3 = parse_space("H3");
  for (double a : {0.5, 1.0, 2.0}) {
    RoeConfig cfg;
    cfg.k_min = -8;
    cfg.k_max = 8;
    const auto rep = roe_verify(single(h3, a), a * a + 1.0, cfg);
    CHECK(rep.per_k_values.size() == 17);
    for (double v : rep.per_k_values) CHECK(v / rep.per_k_values[8] == Approx(1.0).epsilon(1e-9));
    CHECK(rep.eigen_residual <= 1e-6);
    CHECK(rep.verdict == Verdict::Eigenfunction);
    CHECK(rep.consistent);
  }
  RoeConfig cfg;
  cfg.k_min = -10;
  cfg.k_max = 10;
  CHECK(roe_verify(single(h3, 1.0), 2.0, cfg).verdict == Verdict::Eigenfunction);
}

TEST_CASE("spectral edge: phi_{i gamma_{p'} rho} at z = 4 rho^2/(p p')") {
  const auto h3 = parse_space("H3");
  const double p = 1.5;
  const auto f = single(h3, cplx(0.0, -gamma_p(p)));
  RoeConfig cfg;
  cfg.p_prime = conjugate_exponent(p);
  cfg.k_min = 0;
  cfg.k_max = 12;
  const auto rep = roe_verify(f, min_modulus_on_spectrum(h3, p), cfg);
  CHECK(rep.bounded);
  CHECK(rep.eigen_residual <= 1e-6);
  CHECK(rep.verdict == Verdict::Eigenfunction);

  cfg.kind = NormKind::MPPrime;
  CHECK(roe_verify(f, min_modulus_on_spectrum(h3, p), cfg).bounded);
}

TEST_CASE("counterexamples are bounded but not eigenfunctions") {
  const auto h3 = parse_space("H3");
  for (auto [p, beta] : {std::pair{1.5, 1.0}, std::pair{1.3, 0.7}, std::pair{1.7, 2.0}}) {
    const auto pair = counterexample_pair(h3, p, beta);
    RoeConfig cfg;
    cfg.p_prime = conjugate_exponent(p);
    cfg.k_min = 0;
    cfg.k_max = 20;
    const auto rep = roe_verify(pair.f, std::abs(pair.target), cfg);
    CHECK(rep.verdict == Verdict::BoundedNotEigen);
    CHECK(rep.consistent);
  }
}

TEST_CASE("interior targets keep boundedness") {
  const auto h3 = parse_space("H3");
  const double p = 1.5;
  const auto pair = counterexample_pair(h3, p, 1.0);
  const double T = 1.1 * std::abs(pair.target);
  const double q = pair.q, r = pair.r;
  const auto a = equal_modulus_solve(h3, strip_gamma(q), T), b = equal_modulus_solve(h3, strip_gamma(r), T);
  const EigenCombination f{h3, {{1.0, std::conj(a.lambda)}, {1.0, std::conj(b.lambda)}}};
  RoeConfig cfg;
  cfg.p_prime = conjugate_exponent(p);
  cfg.k_min = 0;
  cfg.k_max = 20;
  CHECK(roe_verify(f, T, cfg).bounded);
}

TEST_CASE("below the threshold no equal-modulus combination exists on the strip") {
  const auto h3 = parse_space("H3");
  oracle::Stream rng(41);
  for (int i = 0; i < 100; ++i) {
    const double p = rng.uniform(1.05, 2.0);
    const double z = rng.uniform(0.0, 0.999) * min_modulus_on_spectrum(h3, p);
    const double g = rng.uniform(0.0, strip_gamma(p));
    CHECK_THROWS_AS(equal_modulus_solve(h3, g, z), std::domain_error);
  }
}

TEST_CASE("phi_0 has no finite weak-L^2 bound") {
  const auto h3 = parse_space("H3");
  RoeConfig cfg;
  cfg.k_min = -2;
  cfg.k_max = 2;
  const auto rep = roe_verify(single(h3, 0.0), 1.0, cfg);
  for (std::size_t i = 0; i < rep.per_k_values.size(); ++i) CHECK(rep.per_k_values[i] > 1.2 * rep.per_k_half[i]);
  CHECK_FALSE(rep.bounded);
}

TEST_CASE("one-sided pair: forward bounded, backward unbounded") {
  const auto h3 = parse_space("H3");
  const auto f = one_sided_pair(h3, 1.0);
  RoeConfig fwd;
  fwd.k_min = 0;
  fwd.k_max = 10;
  CHECK(roe_verify(f, 2.0, fwd).bounded);
  RoeConfig back;
  back.k_min = -10;
  back.k_max = 0;
  const auto rep = roe_verify(f, 2.0, back);
  CHECK(rep.verdict == Verdict::Unbounded);
  CHECK(rep.per_k_values.front() / rep.per_k_values[9] >= 10.0);
}

TEST_CASE("other size functionals") {
  const auto h3 = parse_space("H3");
  RoeConfig cfg;
  cfg.k_min = -3;
  cfg.k_max = 3;
  for (NormKind kind : {NormKind::APPrimeQ, NormKind::SupPhiRatio, NormKind::SupWeightedInfty}) {
    cfg.kind = kind;
    const auto rep = roe_verify(single(h3, 1.0), 2.0, cfg);
    CHECK(rep.verdict == Verdict::Eigenfunction);
    for (double v : rep.per_k_values) CHECK(std::isfinite(v));
  }
  cfg.kind = NormKind::SupPhiRatio;
  CHECK(roe_verify(single(h3, 1.0), 2.0, cfg).per_k_values[0] == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("norm kind strings round-trip") {
  for (NormKind k : {NormKind::WeakPPrime, NormKind::MPPrime, NormKind::APPrimeQ, NormKind::SupPhiRatio,
                     NormKind::SupWeightedInfty, NormKind::Sup})
    CHECK(norm_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(norm_kind_from_string("nope"), std::invalid_argument);
}

TEST_CASE("roe_verify input checks") {
  const auto h3 = parse_space("H3");
  RoeConfig cfg;
  cfg.k_min = 3;
  cfg.k_max = 2;
  CHECK_THROWS_AS(roe_verify(single(h3, 1.0), 2.0, cfg), std::invalid_argument);
}

TEST_CASE("Euclidean baseline") {
  EuclidConfig two;
  CHECK(euclid_roe_demo(1.0, {{1.0, 1.0, 0.0}}, two).verdict == Verdict::Eigenfunction);
  EuclidConfig back;
  back.k_min = -10;
  back.k_max = 0;
  CHECK(euclid_roe_demo(1.0, {{1.0, 1.0, 0.0}, {1.0, 0.5, 0.0}}, back).verdict == Verdict::Unbounded);
  EuclidConfig fwd;
  fwd.k_min = 0;
  fwd.k_max = 10;
  const auto c = euclid_roe_demo(1.0, {{1.0, 1.0, 0.0}, {1.0, 2.0, 0.0}}, fwd);
  CHECK(c.verdict == Verdict::Unbounded);
  CHECK(c.per_k_values.back() / c.per_k_values.front() >= std::pow(4.0, 10) / 2.0);
  // Two frequencies below alpha: forward bounded, not an eigenfunction.
  const auto d = euclid_roe_demo(1.0, {{1.0, 1.0, 0.0}, {1.0, 0.5, 0.3}}, fwd);
  CHECK(d.verdict == Verdict::BoundedNotEigen);
}
