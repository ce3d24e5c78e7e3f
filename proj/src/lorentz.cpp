#include "roekit/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roekit {

namespace {

struct Piece {
  double value;   // |f| on the piece
  double log_mu;  // log of its measure
};

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_sum(const std::vector<double>& logs) {
  double hi = -kInf;
  for (double v : logs) hi = std::max(hi, v);
  if (hi == -kInf) return -kInf;
  double s = 0.0;
  for (double v : logs) s += std::exp(v - hi);
  return hi + std::log(s);
}

const numerics::GaussRule& gl3() {
  static const numerics::GaussRule rule = numerics::gauss_legendre(3);
  return rule;
}

const numerics::GaussRule& gl5() {
  static const numerics::GaussRule rule = numerics::gauss_legendre(5);
  return rule;
}

// log of int_a^b g(r) J(r) dr for g = exp(log_g(r)), Gauss-Legendre.
template <class LogG>
double log_weighted_integral(const SpaceParams& s, double a, double b, const numerics::GaussRule& rule, LogG log_g) {
  if (!(b > a)) return -kInf;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::vector<double> logs;
  logs.reserve(rule.nodes.size());
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double x = c + h * rule.nodes[k];
    const double lg = log_g(x);
    if (lg == -kInf) continue;
    logs.push_back(std::log(rule.weights[k]) + s.log_density(x) + lg);
  }
  if (logs.empty()) return -kInf;
  return log_sum(logs) + std::log(h);
}

double log_ball_piece(const SpaceParams& s, double a, double b) {
  return log_weighted_integral(s, a, b, gl3(), [](double) { return 0.0; });
}

double clamp_R(const std::vector<double>& r, double R, const char* what) {
  if (R == kInf) return r.back();
  if (!(R > r.front())) throw std::invalid_argument(std::string(what) + ": truncation radius must exceed the first node");
  if (R > r.back() * (1.0 + 1e-12))
    throw std::invalid_argument(std::string(what) + ": truncation radius beyond the tabulated range");
  return std::min(R, r.back());
}

// Linear interpolant of the node values a (at x0) and b (at x1) evaluated at x.
double lerp(double x0, double x1, double a, double b, double x) { return a + (b - a) * (x - x0) / (x1 - x0); }

// Level decomposition of |f| on B(0, R): each cell split into equal sub-cells
// carrying the interpolated midpoint value and their exact-to-quadrature mass.
template <class Emit>
void decompose(const SpaceParams& space, const std::vector<double>& r, double R, int sub, Emit emit) {
  for (std::size_t i = 0; i + 1 < r.size() && r[i] < R; ++i) {
    const double a = r[i];
    const double b = std::min(r[i + 1], R);
    const double h = (b - a) / sub;
    for (int k = 0; k < sub; ++k) {
      const double lo = a + k * h;
      const double hi = k + 1 == sub ? b : lo + h;
      const double mid = 0.5 * (lo + hi);
      emit(i, mid, log_ball_piece(space, lo, hi), [&](double fa, double fb) { return lerp(r[i], r[i + 1], fa, fb, mid); });
    }
  }
}

LorentzEstimate norm_from_pieces(std::vector<Piece>& pieces, double p, double q) {
  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.value > y.value; });
  LorentzEstimate est;
  est.p = p;
  est.q = q;
  double log_t = -kInf;
  if (q == kInf) {
    double best = -kInf;
    for (const auto& pc : pieces) {
      if (pc.value <= 0.0) break;
      log_t = log_add(log_t, pc.log_mu);
      best = std::max(best, std::log(pc.value) + log_t / p);
    }
    est.value = best == -kInf ? 0.0 : std::exp(best);
    return est;
  }
  std::vector<double> logs;
  logs.reserve(pieces.size());
  const double e = q / p;
  for (const auto& pc : pieces) {
    if (pc.value <= 0.0) break;
    const double prev = log_t;
    log_t = log_add(log_t, pc.log_mu);
    // t_j^{e} - t_{j-1}^{e} = t_j^{e} (1 - (t_{j-1}/t_j)^{e})
    const double frac = prev == -kInf ? 1.0 : -std::expm1(e * (prev - log_t));
    if (frac <= 0.0) continue;
    logs.push_back(q * std::log(pc.value) + e * log_t + std::log(frac));
  }
  const double ls = log_sum(logs);
  est.value = ls == -kInf ? 0.0 : std::exp(ls / q);
  return est;
}

void check_exponents(double p, double q, const char* what) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument(std::string(what) + ": p must lie in (1, inf)");
  if (!(q >= 1.0)) throw std::invalid_argument(std::string(what) + ": q must be >= 1");
}

std::vector<Piece> radial_pieces(const RadialGridFunction& f, double R, int sub) {
  std::vector<Piece> pieces;
  std::vector<double> absv(f.values.size());
  for (std::size_t i = 0; i < absv.size(); ++i) absv[i] = std::abs(f.values[i]);
  decompose(f.space, f.r, R, sub, [&](std::size_t i, double, double log_mu, auto interp) {
    pieces.push_back({interp(absv[i], absv[i + 1]), log_mu});
  });
  return pieces;
}

std::vector<Piece> polar_pieces(const PolarGridFunction& u, double R, int sub) {
  const std::size_t nt = u.angles.theta.size();
  std::vector<double> absv(u.values.size());
  for (std::size_t i = 0; i < absv.size(); ++i) absv[i] = std::abs(u.values[i]);
  std::vector<double> log_w(nt);
  for (std::size_t j = 0; j < nt; ++j) log_w[j] = std::log(u.angles.weights[j]);
  std::vector<Piece> pieces;
  decompose(u.space, u.r, R, sub, [&](std::size_t i, double, double log_mu, auto interp) {
    for (std::size_t j = 0; j < nt; ++j)
      pieces.push_back({interp(absv[i * nt + j], absv[(i + 1) * nt + j]), log_mu + log_w[j]});
  });
  return pieces;
}

double slope(double v_hi, double v_lo, double R_hi, double R_lo) {
  if (v_lo <= 0.0) return v_hi > 0.0 ? kInf : 0.0;
  return std::log(v_hi / v_lo) / std::log(R_hi / R_lo);
}

}  // namespace

void RadialGridFunction::validate() const {
  if (r.size() < 2) throw std::invalid_argument("RadialGridFunction: need at least two nodes");
  if (r.size() != values.size()) throw std::invalid_argument("RadialGridFunction: size mismatch");
  if (!(r.front() >= 0.0)) throw std::invalid_argument("RadialGridFunction: radii must be nonnegative");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i > 0 && !(r[i] > r[i - 1])) throw std::invalid_argument("RadialGridFunction: grid must strictly increase");
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
      throw std::invalid_argument("RadialGridFunction: non-finite value");
  }
}

void PolarGridFunction::validate() const {
  if (r.size() < 2) throw std::invalid_argument("PolarGridFunction: need at least two radial nodes");
  if (angles.theta.empty() || angles.theta.size() != angles.weights.size())
    throw std::invalid_argument("PolarGridFunction: bad angular rule");
  if (values.size() != r.size() * angles.theta.size()) throw std::invalid_argument("PolarGridFunction: size mismatch");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw std::invalid_argument("PolarGridFunction: grid must strictly increase");
  for (std::size_t j = 1; j < angles.theta.size(); ++j)
    if (!(angles.theta[j] > angles.theta[j - 1])) throw std::invalid_argument("PolarGridFunction: angles must increase");
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw std::invalid_argument("PolarGridFunction: non-finite value");
}

AngularRule angular_rule(int dim, int n) {
  if (dim < 2) throw std::invalid_argument("angular_rule: dimension must be >= 2");
  const auto g = numerics::gauss_gegenbauer(n, 0.5 * (dim - 2));
  double total = 0.0;
  for (double w : g.weights) total += w;
  AngularRule out;
  for (int k = n - 1; k >= 0; --k) {
    out.theta.push_back(std::acos(std::clamp(g.nodes[k], -1.0, 1.0)));
    out.weights.push_back(g.weights[k] / total);
  }
  return out;
}

double distribution_function(const RadialGridFunction& f, double s, double R) {
  f.validate();
  if (!(s > 0.0)) throw std::invalid_argument("distribution_function: level must be positive");
  R = clamp_R(f.r, R, "distribution_function");
  const auto& rule = gl5();
  double total = 0.0;
  auto mass = [&](double a, double b) {
    const double ls = log_weighted_integral(f.space, a, b, rule, [](double) { return 0.0; });
    return ls == -kInf ? 0.0 : std::exp(ls);
  };
  for (std::size_t i = 0; i + 1 < f.r.size() && f.r[i] < R; ++i) {
    const double x0 = f.r[i], x1 = f.r[i + 1];
    const double fa = std::abs(f.values[i]), fb_node = std::abs(f.values[i + 1]);
    const double b = std::min(x1, R);
    const double fb = lerp(x0, x1, fa, fb_node, b);
    const bool in_a = fa > s, in_b = fb > s;
    if (!in_a && !in_b) continue;
    if (in_a && in_b) {
      total += mass(x0, b);
      continue;
    }
    const double cross = x0 + (s - fa) * (x1 - x0) / (fb_node - fa);
    total += in_a ? mass(x0, std::min(cross, b)) : mass(std::max(cross, x0), b);
  }
  return total;
}

double rearrangement(const RadialGridFunction& f, double t, double R) {
  f.validate();
  if (!(t > 0.0)) throw std::invalid_argument("rearrangement: t must be positive");
  R = clamp_R(f.r, R, "rearrangement");
  double hi = 0.0;
  for (std::size_t i = 0; i < f.r.size() && f.r[i] <= R; ++i) hi = std::max(hi, std::abs(f.values[i]));
  if (hi == 0.0) return 0.0;
  double lo = 0.0;
  // d(lo) > t is the loop invariant; d(hi) = 0 <= t.
  if (distribution_function(f, std::max(hi * 1e-300, 1e-308), R) <= t) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (distribution_function(f, mid, R) <= t)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

LorentzEstimate lorentz_norm(const RadialGridFunction& f, double p, double q, double R, const LorentzOptions& opt) {
  f.validate();
  check_exponents(p, q, "lorentz_norm");
  R = clamp_R(f.r, R, "lorentz_norm");
  auto pieces = radial_pieces(f, R, opt.subdivisions);
  auto est = norm_from_pieces(pieces, p, q);
  est.truncation_R = R;
  double half = 0.0;
  if (R / 2 > f.r.front()) {
    auto hp = radial_pieces(f, R / 2, opt.subdivisions);
    half = norm_from_pieces(hp, p, q).value;
    est.sequence.emplace_back(R / 2, half);
  }
  est.sequence.emplace_back(R, est.value);
  est.tail_slope = slope(est.value, half, R, R / 2);
  return est;
}

LorentzEstimate lorentz_norm(const PolarGridFunction& u, double p, double q, double R, const LorentzOptions& opt) {
  u.validate();
  check_exponents(p, q, "lorentz_norm");
  R = clamp_R(u.r, R, "lorentz_norm");
  auto pieces = polar_pieces(u, R, opt.subdivisions);
  auto est = norm_from_pieces(pieces, p, q);
  est.truncation_R = R;
  double half = 0.0;
  if (R / 2 > u.r.front()) {
    auto hp = polar_pieces(u, R / 2, opt.subdivisions);
    half = norm_from_pieces(hp, p, q).value;
    est.sequence.emplace_back(R / 2, half);
  }
  est.sequence.emplace_back(R, est.value);
  est.tail_slope = slope(est.value, half, R, R / 2);
  return est;
}

namespace {

// Cumulative log int_0^{r_i} |f|^p J over whole cells.
std::vector<double> cumulative_log_power(const RadialGridFunction& f, double p) {
  std::vector<double> cum(f.r.size(), -kInf);
  for (std::size_t i = 0; i + 1 < f.r.size(); ++i) {
    const double fa = std::abs(f.values[i]), fb = std::abs(f.values[i + 1]);
    const double x0 = f.r[i], x1 = f.r[i + 1];
    const double cell = log_weighted_integral(f.space, x0, x1, gl5(), [&](double x) {
      const double v = lerp(x0, x1, fa, fb, x);
      return v > 0.0 ? p * std::log(v) : -kInf;
    });
    cum[i + 1] = log_add(cum[i], cell);
  }
  return cum;
}

double log_power_upto(const RadialGridFunction& f, double p, const std::vector<double>& cum, double R) {
  const auto it = std::upper_bound(f.r.begin(), f.r.end(), R);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - f.r.begin() - 1, 0));
  if (i + 1 >= f.r.size() || R <= f.r[i]) return cum[i];
  const double x0 = f.r[i], x1 = f.r[i + 1];
  const double fa = std::abs(f.values[i]), fb = std::abs(f.values[i + 1]);
  const double part = log_weighted_integral(f.space, x0, R, gl5(), [&](double x) {
    const double v = lerp(x0, x1, fa, fb, x);
    return v > 0.0 ? p * std::log(v) : -kInf;
  });
  return log_add(cum[i], part);
}

}  // namespace

double lp_norm(const RadialGridFunction& f, double p, double R) {
  f.validate();
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("lp_norm: p must lie in [1, inf)");
  R = clamp_R(f.r, R, "lp_norm");
  const auto cum = cumulative_log_power(f, p);
  const double l = log_power_upto(f, p, cum, R);
  return l == -kInf ? 0.0 : std::exp(l / p);
}

LorentzEstimate m_p(const RadialGridFunction& f, double p, const std::vector<double>& R_schedule) {
  f.validate();
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("m_p: p must lie in [1, inf)");
  if (R_schedule.empty()) throw std::invalid_argument("m_p: empty schedule");
  for (std::size_t i = 0; i < R_schedule.size(); ++i) {
    if (i > 0 && !(R_schedule[i] > R_schedule[i - 1])) throw std::invalid_argument("m_p: schedule must increase");
    clamp_R(f.r, R_schedule[i], "m_p");
  }
  const auto cum = cumulative_log_power(f, p);
  LorentzEstimate est;
  est.p = p;
  est.q = p;
  for (double R : R_schedule) {
    const double l = log_power_upto(f, p, cum, R);
    est.sequence.emplace_back(R, l == -kInf ? 0.0 : std::exp((l - std::log(R)) / p));
  }
  const double R_last = R_schedule.back();
  est.truncation_R = R_last;
  est.value = 0.0;
  for (const auto& [R, v] : est.sequence)
    if (R >= 0.5 * R_last) est.value = std::max(est.value, v);
  std::size_t half = 0;
  for (std::size_t i = 0; i < R_schedule.size(); ++i)
    if (std::abs(R_schedule[i] - 0.5 * R_last) < std::abs(R_schedule[half] - 0.5 * R_last)) half = i;
  if (half + 1 < R_schedule.size())
    est.tail_slope = slope(est.sequence.back().second, est.sequence[half].second, R_last, R_schedule[half]);
  return est;
}

RadialGridFunction angular_mean(const PolarGridFunction& u, double q) {
  u.validate();
  if (!(q >= 1.0)) throw std::invalid_argument("angular_mean: q must be >= 1");
  const std::size_t nt = u.angles.theta.size();
  RadialGridFunction out{u.space, u.r, std::vector<cplx>(u.r.size())};
  for (std::size_t i = 0; i < u.r.size(); ++i) {
    double acc = 0.0;
    if (q == kInf) {
      for (std::size_t j = 0; j < nt; ++j) acc = std::max(acc, std::abs(u.at(i, j)));
    } else {
      for (std::size_t j = 0; j < nt; ++j) acc += u.angles.weights[j] * std::pow(std::abs(u.at(i, j)), q);
      acc = std::pow(acc, 1.0 / q);
    }
    out.values[i] = acc;
  }
  return out;
}

LorentzEstimate a_pq(const PolarGridFunction& u, double p, double q, double R, const LorentzOptions& opt) {
  auto est = lorentz_norm(angular_mean(u, q), p, kInf, R, opt);
  return est;
}

RadialGridFunction radialize(const PolarGridFunction& u) {
  u.validate();
  const std::size_t nt = u.angles.theta.size();
  RadialGridFunction out{u.space, u.r, std::vector<cplx>(u.r.size())};
  for (std::size_t i = 0; i < u.r.size(); ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < nt; ++j) acc += u.angles.weights[j] * u.at(i, j);
    out.values[i] = acc;
  }
  return out;
}

PolarGridFunction to_polar(const RadialGridFunction& f, int n_theta) {
  f.validate();
  PolarGridFunction u{f.space, f.r, angular_rule(f.space.dim(), n_theta), {}};
  const std::size_t nt = u.angles.theta.size();
  u.values.resize(f.r.size() * nt);
  for (std::size_t i = 0; i < f.r.size(); ++i)
    for (std::size_t j = 0; j < nt; ++j) u.values[i * nt + j] = f.values[i];
  return u;
}

}  // namespace roekit
