#include "roekit/space.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "roekit/numerics.hpp"

namespace roekit {

using numerics::coth;
using numerics::log_sinh;

SpaceParams make_space(const SpaceKind& kind) {
  SpaceParams s;
  if (const auto* rh = std::get_if<RealHyperbolic>(&kind)) {
    if (rh->n < 2) throw std::invalid_argument("make_space: real hyperbolic dimension must be >= 2");
    return make_space(SymmetricRankOne{rh->n - 1, 0});
  }
  if (const auto* sym = std::get_if<SymmetricRankOne>(&kind)) {
    if (sym->m_gamma < 0 || sym->m_2gamma < 0)
      throw std::invalid_argument("make_space: multiplicities must be nonnegative");
    if (sym->m_gamma + sym->m_2gamma == 0)
      throw std::invalid_argument("make_space: zero-dimensional space");
    s.norm_ = Normalization::Symmetric;
    s.a_ = sym->m_gamma;
    s.b_ = sym->m_2gamma;
    s.rho_ = 0.5 * (sym->m_gamma + 2.0 * sym->m_2gamma);
    s.dim_ = sym->m_gamma + sym->m_2gamma + 1;
    return s;
  }
  const auto& dr = std::get<DamekRicci>(kind);
  if (dr.m < 0 || dr.l < 0) throw std::invalid_argument("make_space: multiplicities must be nonnegative");
  if (dr.m + dr.l == 0) throw std::invalid_argument("make_space: zero-dimensional space");
  if (dr.m == 0) throw std::invalid_argument("make_space: a Damek-Ricci space needs m > 0");
  // H-type algebras have even dim v; l = 0 (abelian N) is exempt.
  if (dr.l > 0 && dr.m % 2 != 0) throw std::invalid_argument("make_space: m must be even for a Damek-Ricci space");
  s.norm_ = Normalization::DamekRicci;
  s.a_ = dr.m;
  s.b_ = dr.l;
  s.rho_ = 0.5 * (0.5 * dr.m + dr.l);
  s.dim_ = dr.m + dr.l + 1;
  return s;
}

double SpaceParams::log_density(double r) const {
  if (!(r > 0.0)) throw std::domain_error("log_density: r must be positive");
  if (norm_ == Normalization::Symmetric) {
    return a_ * log_sinh(r) + (b_ > 0 ? b_ * log_sinh(2.0 * r) : 0.0);
  }
  return a_ * std::log(2.0) + (b_ > 0 ? b_ * log_sinh(r) : 0.0) + (a_ > 0 ? a_ * log_sinh(0.5 * r) : 0.0);
}

double SpaceParams::density(double r) const {
  if (r < 0.0 || std::isnan(r)) throw std::invalid_argument("density: r must be nonnegative");
  if (r == 0.0) return 0.0;
  return std::exp(log_density(r));
}

double SpaceParams::density_log_derivative(double r) const {
  if (!(r > 0.0)) throw std::domain_error("density_log_derivative: r must be positive");
  if (norm_ == Normalization::Symmetric) return a_ * coth(r) + 2.0 * b_ * coth(2.0 * r);
  return b_ * coth(r) + 0.5 * a_ * coth(0.5 * r);
}

double SpaceParams::density_log_derivative_linear_term() const {
  // coth x = 1/x + x/3 + O(x^3)
  if (norm_ == Normalization::Symmetric) return a_ / 3.0 + 4.0 * b_ / 3.0;
  return b_ / 3.0 + a_ / 12.0;
}

std::string SpaceParams::label() const {
  return (norm_ == Normalization::Symmetric ? "sym:" : "dr:") + std::to_string(a_) + "," + std::to_string(b_);
}

double gamma_p(double p) {
  if (!(p > 0.0 && p <= 2.0)) throw std::invalid_argument("gamma_p: p must lie in (0, 2]");
  return 2.0 / p - 1.0;
}

double conjugate_exponent(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("conjugate_exponent: p must exceed 1");
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double ball_volume(const SpaceParams& space, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("ball_volume: R must be positive");
  // Log-spaced break points keep the small-r power law and the e^{2 rho r}
  // growth both well resolved.
  std::vector<double> breaks{0.0};
  for (double b = std::min(R, 1e-3); b < R; b *= 4.0) breaks.push_back(b);
  for (double b = 1.0; b < R; b += 1.0)
    if (b > breaks.back()) breaks.push_back(b);
  breaks.push_back(R);
  numerics::QuadOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = 1e-13;
  auto res = numerics::integrate([&](double r) { return space.density(r); }, breaks, opt);
  return res.value;
}

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::invalid_argument("parse_space: bad integer in '" + std::string(whole) + "'");
  return v;
}

std::pair<int, int> parse_pair(std::string_view s, std::string_view whole) {
  const auto comma = s.find(',');
  if (comma == std::string_view::npos)
    throw std::invalid_argument("parse_space: expected two comma-separated integers in '" + std::string(whole) + "'");
  return {parse_int(s.substr(0, comma), whole), parse_int(s.substr(comma + 1), whole)};
}

}  // namespace

SpaceParams parse_space(std::string_view spec) {
  std::string_view body = spec;
  std::string_view norm;
  if (const auto semi = spec.find(';'); semi != std::string_view::npos) {
    body = spec.substr(0, semi);
    const auto suffix = spec.substr(semi + 1);
    if (suffix.substr(0, 5) != "norm=") throw std::invalid_argument("parse_space: unknown suffix in '" + std::string(spec) + "'");
    norm = suffix.substr(5);
    if (norm != "sym" && norm != "dr") throw std::invalid_argument("parse_space: norm must be sym or dr");
  }
  int a = 0, b = 0;
  std::string_view natural;
  if (!body.empty() && (body[0] == 'H' || body[0] == 'h')) {
    a = parse_int(body.substr(1), spec) - 1;
    b = 0;
    natural = "sym";
    if (a < 1) throw std::invalid_argument("parse_space: real hyperbolic dimension must be >= 2");
  } else if (body.substr(0, 4) == "sym:") {
    std::tie(a, b) = parse_pair(body.substr(4), spec);
    natural = "sym";
  } else if (body.substr(0, 3) == "dr:") {
    std::tie(a, b) = parse_pair(body.substr(3), spec);
    natural = "dr";
  } else {
    throw std::invalid_argument("parse_space: unrecognised space '" + std::string(spec) + "'");
  }
  if (norm.empty()) norm = natural;
  if (norm == "sym") return make_space(SymmetricRankOne{a, b});
  return make_space(DamekRicci{a, b});
}

}  // namespace roekit
