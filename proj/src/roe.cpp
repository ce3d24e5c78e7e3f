#include "roekit/roe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "roekit/spectrum.hpp"
#include "roekit/spherical.hpp"

namespace roekit {

namespace {

cplx ipow(cplx base, int k) {
  if (k < 0) {
    base = 1.0 / base;
    k = -k;
  }
  cplx out = 1.0;
  while (k > 0) {
    if (k & 1) out *= base;
    base *= base;
    k >>= 1;
  }
  return out;
}

double sup_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

struct Tabulated {
  std::vector<double> t;
  std::vector<std::vector<cplx>> phi;  // per term
};

Tabulated tabulate(const EigenCombination& f, const std::vector<double>& grid) {
  Tabulated tab{grid, {}};
  for (const auto& term : f.terms) tab.phi.push_back(phi_ode(f.space, term.lambda, grid));
  return tab;
}

std::vector<cplx> combine(const Tabulated& tab, const std::vector<cplx>& coeffs) {
  std::vector<cplx> out(tab.t.size(), 0.0);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += coeffs[i] * tab.phi[i][j];
  return out;
}

// max over k relative to the value at the k nearest 0.
double growth_over_reference(const std::vector<double>& v, int k_min) {
  const auto ref = static_cast<std::size_t>(std::clamp(-k_min, 0, static_cast<int>(v.size()) - 1));
  const double hi = *std::max_element(v.begin(), v.end());
  return v[ref] > 0.0 ? hi / v[ref] : kInf;
}

std::vector<double> m_schedule(double R) {
  std::vector<double> s;
  for (int j = 4; j <= 16; ++j) s.push_back(R * j / 16.0);
  return s;
}

std::string verdict_tag(bool two_sided, bool backward_only, NormKind kind, double modulus, double threshold,
                        Verdict verdict, bool& consistent) {
  const bool at = std::abs(modulus - threshold) <= 1e-9 * std::max(threshold, 1.0);
  const bool below = !at && modulus < threshold;
  const bool weighted = kind == NormKind::SupPhiRatio || kind == NormKind::SupWeightedInfty;
  consistent = true;
  if (backward_only) return "backward_powers_only";
  if (below) {
    consistent = verdict == Verdict::Unbounded;
    return two_sided ? "two_sided_below_threshold" : "one_sided_below_threshold";
  }
  if (weighted) {
    consistent = verdict != Verdict::BoundedNotEigen;
    return kind == NormKind::SupPhiRatio ? "weighted_sup_spherical" : "weighted_sup_strip";
  }
  if (two_sided) {
    consistent = verdict != Verdict::BoundedNotEigen;
    return "two_sided_on_spectrum";
  }
  if (at) {
    consistent = verdict != Verdict::BoundedNotEigen;
    return "one_sided_at_threshold";
  }
  return "one_sided_interior";
}

}  // namespace

std::vector<cplx> EigenCombination::evaluate(const std::vector<double>& t_grid) const {
  std::vector<cplx> out(t_grid.size(), 0.0);
  for (const auto& term : terms) {
    const auto phi = phi_ode(space, term.lambda, t_grid);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += term.coeff * phi[j];
  }
  return out;
}

EigenCombination laplacian_power(const EigenCombination& f, int k) {
  EigenCombination out = f;
  for (auto& term : out.terms) {
    const cplx ev = eigenvalue_of(f.space, term.lambda);
    if (k < 0 && ev == cplx(0.0)) throw std::domain_error("laplacian_power: negative power of a zero eigenvalue");
    term.coeff *= ipow(ev, k);
  }
  return out;
}

double eigen_residual(const EigenCombination& f, cplx w, const std::vector<double>& probe_grid) {
  const auto tab = tabulate(f, probe_grid);
  std::vector<cplx> c, cd;
  for (const auto& term : f.terms) {
    c.push_back(term.coeff);
    cd.push_back(term.coeff * (eigenvalue_of(f.space, term.lambda) - w));
  }
  const double denom = sup_abs(combine(tab, c));
  if (denom == 0.0) throw std::domain_error("eigen_residual: f vanishes on the probe grid");
  return sup_abs(combine(tab, cd)) / denom;
}

const char* to_string(NormKind kind) {
  switch (kind) {
    case NormKind::WeakPPrime: return "weak_pprime";
    case NormKind::MPPrime: return "M_pprime";
    case NormKind::APPrimeQ: return "A_pprime_q";
    case NormKind::SupPhiRatio: return "sup_phi_ratio";
    case NormKind::SupWeightedInfty: return "sup_weighted_infty";
    case NormKind::Sup: return "sup";
  }
  return "?";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Eigenfunction: return "eigenfunction";
    case Verdict::BoundedNotEigen: return "bounded_not_eigen";
    case Verdict::Unbounded: return "unbounded";
  }
  return "?";
}

NormKind norm_kind_from_string(const std::string& s) {
  for (auto k : {NormKind::WeakPPrime, NormKind::MPPrime, NormKind::APPrimeQ, NormKind::SupPhiRatio,
                 NormKind::SupWeightedInfty, NormKind::Sup})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown norm kind '" + s + "'");
}

RoeReport roe_verify(const EigenCombination& f, cplx z, const RoeConfig& cfg) {
  if (cfg.k_max < cfg.k_min) throw std::invalid_argument("roe_verify: empty k range");
  if (f.terms.empty()) throw std::invalid_argument("roe_verify: empty combination");
  if (z == cplx(0.0)) throw std::invalid_argument("roe_verify: z must be nonzero");
  if (!(cfg.truncation_R > 2.0 * cfg.grid_step)) throw std::invalid_argument("roe_verify: truncation radius too small");
  const SpaceParams& space = f.space;
  const double rho = space.rho();
  const double R = cfg.truncation_R;
  const auto grid = numerics::arange_inclusive(0.0, R, cfg.grid_step);
  const auto tab = tabulate(f, grid);

  std::vector<double> weight;
  if (cfg.kind == NormKind::SupPhiRatio || cfg.kind == NormKind::SupWeightedInfty) {
    const cplx lw = cfg.kind == NormKind::SupPhiRatio ? std::sqrt(cplx(std::abs(z) - rho * rho))
                                                      : cplx(0.0, strip_gamma(cfg.p_prime) * rho);
    const auto phi_w = phi_ode(space, lw, grid);
    const auto phi_0 = phi_ode(space, 0.0, grid);
    weight.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double a = std::abs(phi_w[j]);
      weight[j] = a < cfg.weight_floor * std::abs(phi_0[j]) ? 0.0 : 1.0 / a;
    }
  }

  auto functional = [&](const std::vector<cplx>& vals, double trunc) -> double {
    RadialGridFunction g{space, grid, vals};
    switch (cfg.kind) {
      case NormKind::WeakPPrime: return lorentz_norm(g, cfg.p_prime, kInf, trunc).value;
      case NormKind::MPPrime: return m_p(g, cfg.p_prime, m_schedule(trunc)).value;
      case NormKind::APPrimeQ: return a_pq(to_polar(g, 8), cfg.p_prime, cfg.q, trunc).value;
      case NormKind::SupPhiRatio:
      case NormKind::SupWeightedInfty: {
        double m = 0.0;
        for (std::size_t j = 0; j < grid.size() && grid[j] <= trunc; ++j) m = std::max(m, std::abs(vals[j]) * weight[j]);
        return m;
      }
      case NormKind::Sup: {
        double m = 0.0;
        for (std::size_t j = 0; j < grid.size() && grid[j] <= trunc; ++j) m = std::max(m, std::abs(vals[j]));
        return m;
      }
    }
    return 0.0;
  };

  RoeReport rep;
  rep.z = z;
  rep.k_min = cfg.k_min;
  rep.k_max = cfg.k_max;
  rep.norm_kind = cfg.kind;
  rep.truncation_R = R;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    std::vector<cplx> coeffs;
    for (const auto& term : f.terms) coeffs.push_back(term.coeff * ipow(eigenvalue_of(space, term.lambda) / z, k));
    const auto vals = combine(tab, coeffs);
    rep.per_k_values.push_back(functional(vals, R));
    rep.per_k_half.push_back(functional(vals, R / 2));
  }
  double lo = kInf, hi = 0.0;
  for (std::size_t i = 0; i < rep.per_k_values.size(); ++i) {
    const double v = rep.per_k_values[i];
    if (!std::isfinite(v)) throw NumericalError("roe_verify: non-finite functional value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    const double drift = v > 0.0 ? std::abs(v - rep.per_k_half[i]) / v : 0.0;
    rep.truncation_drift = std::max(rep.truncation_drift, drift);
  }
  rep.bound_M = hi;
  rep.spread = lo > 0.0 ? hi / lo : kInf;
  rep.growth = growth_over_reference(rep.per_k_values, cfg.k_min);
  rep.bounded = rep.growth <= cfg.bounded_ratio && rep.truncation_drift <= cfg.stability_tol;

  std::vector<cplx> c, cd;
  const cplx w = -std::abs(z);
  for (const auto& term : f.terms) {
    c.push_back(term.coeff);
    cd.push_back(term.coeff * (eigenvalue_of(space, term.lambda) - w));
  }
  const double denom = sup_abs(combine(tab, c));
  if (denom == 0.0) throw std::domain_error("roe_verify: f vanishes on the grid");
  rep.eigen_residual = sup_abs(combine(tab, cd)) / denom;

  if (!rep.bounded)
    rep.verdict = Verdict::Unbounded;
  else
    rep.verdict = rep.eigen_residual <= cfg.eigen_tol ? Verdict::Eigenfunction : Verdict::BoundedNotEigen;

  const bool two_sided = cfg.k_min < 0 && cfg.k_max > 0;
  const bool backward_only = cfg.k_max <= 0 && cfg.k_min < 0;
  const double threshold = min_modulus_on_spectrum(space, cfg.p_prime);
  rep.theorem_tag = verdict_tag(two_sided, backward_only, cfg.kind, std::abs(z), threshold, rep.verdict, rep.consistent);
  return rep;
}

RoeReport euclid_roe_demo(double alpha, const std::vector<EuclidTerm>& terms, const EuclidConfig& cfg) {
  if (!(alpha > 0.0)) throw std::invalid_argument("euclid_roe_demo: alpha must be positive");
  if (terms.empty()) throw std::invalid_argument("euclid_roe_demo: no terms");
  if (cfg.k_max < cfg.k_min) throw std::invalid_argument("euclid_roe_demo: empty k range");
  for (const auto& t : terms)
    if (!(t.omega > 0.0)) throw std::invalid_argument("euclid_roe_demo: frequencies must be positive");
  const auto grid = numerics::arange_inclusive(0.0, cfg.x_max, cfg.grid_step);
  std::vector<std::vector<double>> basis;
  for (const auto& t : terms) {
    std::vector<double> b(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) b[j] = std::sin(t.omega * grid[j] + t.phase);
    basis.push_back(std::move(b));
  }
  auto sup_of = [&](const std::vector<double>& coeffs, double xmax) {
    double m = 0.0;
    for (std::size_t j = 0; j < grid.size() && grid[j] <= xmax; ++j) {
      double v = 0.0;
      for (std::size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * basis[i][j];
      m = std::max(m, std::abs(v));
    }
    return m;
  };
  RoeReport rep;
  rep.z = alpha;
  rep.k_min = cfg.k_min;
  rep.k_max = cfg.k_max;
  rep.norm_kind = NormKind::Sup;
  rep.truncation_R = cfg.x_max;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    std::vector<double> coeffs;
    for (const auto& t : terms) coeffs.push_back(t.coeff * ipow(cplx(-t.omega * t.omega / alpha), k).real());
    rep.per_k_values.push_back(sup_of(coeffs, cfg.x_max));
    rep.per_k_half.push_back(sup_of(coeffs, 0.5 * cfg.x_max));
  }
  double lo = kInf, hi = 0.0;
  for (std::size_t i = 0; i < rep.per_k_values.size(); ++i) {
    const double v = rep.per_k_values[i];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (v > 0.0) rep.truncation_drift = std::max(rep.truncation_drift, std::abs(v - rep.per_k_half[i]) / v);
  }
  rep.bound_M = hi;
  rep.spread = lo > 0.0 ? hi / lo : kInf;
  rep.growth = growth_over_reference(rep.per_k_values, cfg.k_min);
  rep.bounded = rep.growth <= cfg.bounded_ratio && rep.truncation_drift <= cfg.stability_tol;
  std::vector<double> c, cd;
  for (const auto& t : terms) {
    c.push_back(t.coeff);
    cd.push_back(t.coeff * (-t.omega * t.omega + alpha));
  }
  const double denom = sup_of(c, cfg.x_max);
  if (denom == 0.0) throw std::domain_error("euclid_roe_demo: f vanishes on the grid");
  rep.eigen_residual = sup_of(cd, cfg.x_max) / denom;
  if (!rep.bounded)
    rep.verdict = Verdict::Unbounded;
  else
    rep.verdict = rep.eigen_residual <= cfg.eigen_tol ? Verdict::Eigenfunction : Verdict::BoundedNotEigen;
  rep.theorem_tag = "euclidean_baseline";
  // A bounded two-sided sequence forces every omega_j^2 = alpha.
  rep.consistent = !(rep.verdict == Verdict::BoundedNotEigen && cfg.k_min < 0 && cfg.k_max > 0);
  return rep;
}

}  // namespace roekit
