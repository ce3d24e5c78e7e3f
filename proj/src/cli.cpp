#include "roekit/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "roekit/io.hpp"
#include "roekit/lorentz.hpp"
#include "roekit/poisson.hpp"
#include "roekit/roe.hpp"
#include "roekit/spectrum.hpp"
#include "roekit/spherical.hpp"

namespace roekit::cli {

namespace {

using json = nlohmann::json;

/// Rejected before any computation; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* kSpaceGrammar =
    "Space grammar: H<n> | sym:<m_gamma>,<m_2gamma> | dr:<m>,<l>, optionally followed by\n"
    "';norm=sym' or ';norm=dr' to switch the metric normalization (multiplicities kept).\n"
    "Complex values: 1, -0.5, 0.3i, 1+0.2i, 1-0.2i.\n"
    "--config FILE reads key=value lines (one flag per line, '#' comments); flags on the\n"
    "command line take precedence.";

cplx parse_complex(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw ConfigError("empty complex number");
  auto number = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number '" + t + "'");
    }
    if (used != t.size()) throw ConfigError("cannot parse number '" + t + "'");
    return v;
  };
  if (s.back() != 'i') return number(s);
  const std::string body = s.substr(0, s.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, number(body)};
  return {number(body.substr(0, split)), number(body.substr(split))};
}

double parse_q(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("cannot parse exponent '" + s + "'");
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json number_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void check_writable(const std::string& path) {
  if (path.empty()) return;
  namespace fs = std::filesystem;
  const fs::path p(path);
  std::error_code ec;
  if (fs::is_directory(p, ec)) throw IoError("output path '" + path + "' is a directory");
  const fs::path parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
  if (!fs::is_directory(parent, ec)) throw IoError("output directory '" + parent.string() + "' does not exist");
}

SpaceParams space_or_config_error(const std::string& spec) {
  try {
    return parse_space(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

/// Evaluates f(0..n-1) on up to `jobs` threads; results keep index order and
/// the first failing index's exception is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& f) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<std::pair<std::string, std::string>> space_meta(const SpaceParams& s) {
  return {{"space", s.label()},
          {"normalization", s.normalization() == Normalization::Symmetric ? "sym" : "dr"},
          {"rho", format_number(s.rho())},
          {"dim", std::to_string(s.dim())}};
}

// ---- selftests: the trivial examples of each module ----

struct Selftest {
  std::vector<std::string> failures;
  int passed = 0;
  void check(bool ok, const std::string& name) {
    if (ok)
      ++passed;
    else
      failures.push_back(name);
  }
  template <class F>
  void check_throws(F&& f, const std::string& name) {
    bool threw = false;
    try {
      f();
    } catch (const std::exception&) {
      threw = true;
    }
    check(threw, name);
  }
};

void selftest_spherical(Selftest& st) {
  const auto h3 = parse_space("H3");
  for (const char* spec : {"H3", "sym:3,0", "dr:2,1"}) {
    const auto s = parse_space(spec);
    const auto grid = numerics::arange_inclusive(0.0, 10.0, 0.5);
    const auto one = phi_ode(s, cplx(0.0, -s.rho()), grid);
    double worst = 0.0;
    for (const auto& v : one) worst = std::max(worst, std::abs(v - 1.0));
    st.check(worst <= 1e-8, std::string("phi_{-i rho} = 1 on ") + spec);
    st.check(std::abs(phi_ode(s, 1.3, {0.0})[0] - 1.0) == 0.0, std::string("phi(0) = 1 on ") + spec);
  }
  st.check(std::abs(phi_ode(h3, 1.0, {2.0})[0] - std::sin(2.0) / std::sinh(2.0)) < 1e-9, "H3 spot value");
  SpectralPoint a{cplx(0.4, 0.3), 1.0}, b{cplx(-0.4, -0.3), 1.0};
  st.check(a.eigenvalue() == b.eigenvalue(), "eigenvalue even in lambda");
  st.check(gamma_p(2.0) == 0.0, "gamma_2 = 0");
  st.check(std::abs(h3.density(1.0) - std::pow(std::sinh(1.0), 2)) < 1e-14, "H3 density");
  st.check_throws([] { make_space(SymmetricRankOne{0, 0}); }, "zero-dimensional space rejected");
}

void selftest_cfit(Selftest& st) {
  const auto fit = fit_c(parse_space("H3"), 1.0);
  st.check(std::abs(fit.c_minus - std::conj(fit.c_plus)) <= 1e-6, "c_minus = conj(c_plus)");
  st.check(std::abs(std::abs(fit.c_plus) - 1.0) <= 0.01, "|c(1)| = 1 on H3");
}

void selftest_norms(Selftest& st) {
  const auto h3 = parse_space("H3");
  RadialGridFunction one{h3, numerics::arange_inclusive(0.0, 5.0, 0.01), {}};
  one.values.assign(one.r.size(), 1.0);
  const double V = ball_volume(h3, 3.0);
  st.check(std::abs(distribution_function(one, 0.5, 3.0) / V - 1.0) < 1e-9, "indicator distribution function");
  st.check(distribution_function(one, 2.0, 3.0) == 0.0, "level above the max");
  st.check(std::abs(lorentz_norm(one, 2.0, kInf, 3.0).value / std::sqrt(V) - 1.0) < 1e-9, "indicator weak norm");
  st.check(std::abs(lorentz_norm(one, 2.0, 1.0, 3.0).value / std::sqrt(V) - 1.0) < 1e-9, "indicator (p,1) norm");
  st.check(std::abs(rearrangement(one, 0.5 * V, 3.0) - 1.0) < 1e-9, "indicator rearrangement");
  const auto back = radialize(to_polar(one, 6));
  bool same = true;
  for (std::size_t i = 0; i < one.r.size(); ++i) same = same && std::abs(back.values[i] - 1.0) < 1e-14;
  st.check(same, "radialize is the identity on radial input");
  st.check_throws([&] { lorentz_norm(one, 2.0, 0.5, 3.0); }, "q < 1 rejected");
}

void selftest_spectrum(Selftest& st) {
  const auto h3 = parse_space("H3");
  for (double p : {1.0, 1.5, 2.0}) st.check(spectrum_contains(h3, p, cplx(-1.0)), "vertex in every sigma_p");
  st.check(spectrum_contains(h3, 2.0, cplx(-2.0)), "sigma_2 contains the ray");
  st.check(!spectrum_contains(h3, 2.0, cplx(-1.0, 1.0)), "sigma_2 is real");
  st.check(min_modulus_on_spectrum(h3, 2.0) == 1.0, "min modulus p = 2");
  st.check(std::abs(min_modulus_on_spectrum(h3, 1.5) - 8.0 / 9.0) < 1e-15, "min modulus p = 1.5");
}

void selftest_counterexample(Selftest& st) {
  const auto h3 = parse_space("H3");
  st.check(std::abs(equal_modulus_solve(h3, 0.0, 2.0).s - 1.0) < 1e-14, "equal-modulus arithmetic");
  st.check(equal_modulus_solve(h3, 0.5, 0.75).s == 0.0, "equal-modulus endpoint");
  st.check_throws([&] { one_sided_pair(h3, 0.0); }, "alpha = 0 rejected");
  st.check_throws([&] { equal_modulus_solve(h3, 0.5, 0.5); }, "target below minimum rejected");
  const auto pair = counterexample_pair(h3, 1.5, 1.0);
  const cplx l1 = pair.f.terms[0].lambda, l2 = pair.f.terms[1].lambda;
  st.check(std::abs(l1 * l1 - l2 * l2) > 1e-6, "counterexample eigenvalues distinct");
}

void selftest_poisson(Selftest& st) {
  const auto h3 = parse_space("H3");
  const ZonalBoundary one{3, {1.0}};
  const auto u = poisson_transform_KM(h3, cplx(0.0, -1.0), one, {0.0, 1.0, 3.0}, 6);
  double worst = 0.0;
  for (const auto& v : u.values) worst = std::max(worst, std::abs(v - 1.0));
  st.check(worst < 1e-10, "P_{-i rho} 1 = 1");
  const auto w = poisson_transform_KM(h3, 1.0, ZonalBoundary{3, {0.0, 1.0}}, {0.0});
  st.check(mean_value_check(w, 1.0, 0.0).residual == 0.0, "mean value at r = 0");
  const auto dr = parse_space("dr:2,1");
  const double C = normalize_C(dr);
  st.check(std::abs(poisson_mass(dr, 0.0, 2.0 * C) - 2.0) < 2e-6, "doubling C doubles the mass");
  st.check(poisson_kernel_N(dr, 0.0, 1.0, 1.0) < poisson_kernel_N(dr, 0.0, 1.0, 0.5), "decay in |Y|");
}

void selftest_roe(Selftest& st) {
  const auto h3 = parse_space("H3");
  const EigenCombination f{h3, {{1.0, cplx(0.7, 0.1)}}};
  st.check(laplacian_power(f, 0).terms[0].coeff == cplx(1.0), "Delta^0 is the identity");
  const cplx L = eigenvalue_of(h3, cplx(0.7, 0.1));
  st.check(std::abs(laplacian_power(f, 3).terms[0].coeff - L * L * L) < 1e-14, "diagonal action");
  const auto grid = numerics::arange_inclusive(0.0, 10.0, 0.1);
  st.check(eigen_residual(f, L, grid) < 1e-8, "single term is an eigenfunction");
  EigenCombination g{h3, {{1.0, 0.5}, {1.0, 1.5}}};
  EigenCombination g5 = g;
  for (auto& t : g5.terms) t.coeff *= 5.0;
  st.check(std::abs(eigen_residual(g, -2.0, grid) - eigen_residual(g5, -2.0, grid)) < 1e-12, "scale invariance");
}

void selftest_euclid(Selftest& st) {
  st.check(euclid_roe_demo(1.0, {{1.0, 1.0, 0.0}}).verdict == Verdict::Eigenfunction, "sin x is an eigenfunction");
  st.check_throws([] { euclid_roe_demo(0.0, {{1.0, 1.0, 0.0}}); }, "alpha = 0 rejected");
}

// ---- option bundles ----

/// Expands "--config FILE" into flags: each "key=value" line becomes
/// "--key value" unless the command line already sets --key.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (file.empty()) return rest;
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file '" + file + "'");
  auto trim = [](std::string t) {
    const auto a = t.find_first_not_of(" \t\r");
    const auto b = t.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
  };
  auto on_command_line = [&](const std::string& flag) {
    return std::any_of(rest.begin(), rest.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(file + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    key.erase(0, key.find_first_not_of('-'));
    if (key.empty()) throw ConfigError(file + ":" + std::to_string(lineno) + ": empty key");
    const std::string flag = "--" + key;
    if (on_command_line(flag)) continue;
    if (key == "selftest") {
      if (value == "true" || value == "1") extra.push_back(flag);
      continue;
    }
    extra.push_back(flag);
    extra.push_back(value);
  }
  // Insert after the subcommand name (first token that is not a flag).
  auto pos = std::find_if(rest.begin(), rest.end(), [](const std::string& a) { return a.empty() || a[0] != '-'; });
  if (pos != rest.end()) ++pos;
  rest.insert(pos, extra.begin(), extra.end());
  return rest;
}

struct Common {
  std::string space = "H3";
  std::string out;
  bool selftest = false;
  int jobs = 1;
  std::string config;
};

void add_common(CLI::App* sub, Common& c, bool with_out = true) {
  sub->add_option("--space", c.space, "Space specification (see grammar below)")->capture_default_str();
  if (with_out) sub->add_option("--out", c.out, "Output file");
  sub->add_flag("--selftest", c.selftest, "Run this module's built-in examples and exit");
  sub->add_option("--jobs", c.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--config", c.config, "key=value configuration file");
  sub->footer(kSpaceGrammar);
}

struct SphericalOpts {
  std::vector<std::string> lambda = {"1"};
  double tmax = 10.0;
  double h = 0.01;
  std::string method = "ode";
  double rel_tol = 1e-13;
  double abs_tol = 1e-15;
};

struct CfitOpts {
  std::vector<double> lambda = {1.0};
  double t0 = 4.0, t1 = 0.0, decay_t0 = 4.0, decay_t1 = 12.0, max_condition = 1e12;
  int orders = 3;
};

struct NormsOpts {
  std::vector<std::string> lambda = {"0", "1"};
  double p = 2.0;
  std::string q = "inf";
  std::string functional = "lorentz";
  double rmax = 40.0;
  double rstep = 2.0;
  double rmin = 2.0;
  double h = 0.01;
};

struct SpectrumOpts {
  std::vector<double> p = {2.0};
  double alpha_min = -10.0, alpha_max = 10.0, alpha_step = 0.01, grid_step = 1e-4;
  std::string emit_boundary;
};

struct CounterOpts {
  double p = 1.5;
  double beta = 1.0;
};

struct PoissonOpts {
  std::string lambda = "1";
  std::vector<double> coeffs = {1.0};
  double tmax = 8.0;
  double h = 0.1;
  int ntheta = kPoissonAngularNodes;
};

struct RoeOpts {
  std::string preset = "custom";
  std::vector<std::string> lambda;
  std::string z;
  std::string norm = "weak_pprime";
  double p = 1.5, beta = 1.0, alpha = 1.0, pprime = 2.0, q = 2.0;
  int kmin = 0, kmax = 10;
  double R = 40.0, h = 0.01, bounded_ratio = 10.0, stability_tol = 0.1, eigen_tol = 1e-4;
  std::string per_k;
};

struct EuclidOpts {
  double alpha = 1.0;
  std::vector<std::string> terms = {"1,1,0"};
  int kmin = -10, kmax = 10;
  double xmax = 200.0, h = 0.01, bounded_ratio = 10.0, stability_tol = 0.1, eigen_tol = 1e-4;
};

// ---- subcommands ----

json cmd_spherical(const Common& c, const SphericalOpts& o) {
  const auto space = space_or_config_error(c.space);
  if (!(o.tmax > 0.0) || !(o.h > 0.0)) throw ConfigError("--tmax and --h must be positive");
  if (o.method != "ode" && o.method != "n-integral") throw ConfigError("--method must be ode or n-integral");
  if (o.method == "n-integral" && space.normalization() != Normalization::DamekRicci)
    throw ConfigError("--method n-integral needs a space in DR normalization");
  std::vector<cplx> lambdas;
  for (const auto& s : o.lambda) lambdas.push_back(parse_complex(s));
  check_writable(c.out);

  const auto grid = numerics::arange_inclusive(0.0, o.tmax, o.h);
  OdeOptions ode;
  ode.rel_tol = o.rel_tol;
  ode.abs_tol = o.abs_tol;
  const auto curves = parallel_map<std::vector<cplx>>(lambdas.size(), c.jobs, [&](std::size_t i) {
    if (o.method == "ode") return phi_ode(space, lambdas[i], grid, ode);
    std::vector<cplx> v;
    for (double t : grid) v.push_back(phi_n_integral(space, lambdas[i], t));
    return v;
  });

  CsvTable table;
  table.meta = space_meta(space);
  table.meta.emplace_back("method", o.method);
  table.meta.emplace_back("rel_tol", format_number(o.rel_tol));
  table.header = {"lambda_re", "lambda_im", "t", "phi_re", "phi_im"};
  json last = json::array();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j)
      table.rows.push_back({lambdas[i].real(), lambdas[i].imag(), grid[j], curves[i][j].real(), curves[i][j].imag()});
    last.push_back({{"lambda", complex_json(lambdas[i])}, {"phi_at_tmax", complex_json(curves[i].back())}});
  }
  if (!c.out.empty()) write_text(c.out, to_csv(table));
  return {{"rows", table.rows.size()}, {"curves", last}};
}

json cmd_cfit(const Common& c, const CfitOpts& o) {
  const auto space = space_or_config_error(c.space);
  check_writable(c.out);
  CFitOptions opt;
  opt.t0 = o.t0;
  opt.t1 = o.t1;
  opt.decay_t0 = o.decay_t0;
  opt.decay_t1 = o.decay_t1;
  opt.correction_orders = o.orders;
  opt.max_condition = o.max_condition;
  const auto fits =
      parallel_map<CFit>(o.lambda.size(), c.jobs, [&](std::size_t i) { return fit_c(space, o.lambda[i], opt); });
  json arr = json::array();
  for (const auto& f : fits) arr.push_back(to_json(f));
  if (!c.out.empty()) write_text(c.out, json({{"space", to_json(space)}, {"fits", arr}}).dump(2) + "\n");
  json brief = json::array();
  for (const auto& f : fits)
    brief.push_back({{"lambda", f.lambda},
                     {"c_plus", complex_json(f.c_plus)},
                     {"abs_c", std::abs(f.c_plus)},
                     {"residual_decay_rate", f.residual_decay_rate}});
  return {{"fits", brief}};
}

json cmd_norms(const Common& c, const NormsOpts& o) {
  const auto space = space_or_config_error(c.space);
  const double q = parse_q(o.q);
  if (o.functional != "lorentz" && o.functional != "mp") throw ConfigError("--functional must be lorentz or mp");
  if (!(o.rmin > 0.0) || !(o.rstep > 0.0) || !(o.rmax >= o.rmin)) throw ConfigError("bad R schedule");
  std::vector<cplx> lambdas;
  for (const auto& s : o.lambda) lambdas.push_back(parse_complex(s));
  check_writable(c.out);
  const auto schedule = numerics::arange_inclusive(o.rmin, o.rmax, o.rstep);
  const auto grid = numerics::arange_inclusive(0.0, o.rmax, o.h);

  const auto estimates = parallel_map<LorentzEstimate>(lambdas.size(), c.jobs, [&](std::size_t i) {
    RadialGridFunction f{space, grid, phi_ode(space, lambdas[i], grid)};
    if (o.functional == "mp") return m_p(f, o.p, schedule);
    LorentzEstimate est = lorentz_norm(f, o.p, q, o.rmax);
    est.sequence.clear();
    for (double R : schedule) est.sequence.emplace_back(R, lorentz_norm(f, o.p, q, R).value);
    return est;
  });

  CsvTable table;
  table.meta = space_meta(space);
  table.meta.emplace_back("functional", o.functional);
  table.meta.emplace_back("p", format_number(o.p));
  table.meta.emplace_back("q", format_number(q));
  table.header = {"lambda_re", "lambda_im", "R", "value"};
  json brief = json::array();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (const auto& [R, v] : estimates[i].sequence) table.rows.push_back({lambdas[i].real(), lambdas[i].imag(), R, v});
    brief.push_back({{"lambda", complex_json(lambdas[i])},
                     {"value", estimates[i].value},
                     {"tail_slope", number_or_string(estimates[i].tail_slope)}});
  }
  if (!c.out.empty()) write_text(c.out, to_csv(table));
  return {{"functional", o.functional}, {"p", o.p}, {"q", number_or_string(q)}, {"estimates", brief}};
}

json cmd_spectrum(const Common& c, const SpectrumOpts& o) {
  const auto space = space_or_config_error(c.space);
  for (double p : o.p)
    if (!(p >= 1.0)) throw ConfigError("--p must be >= 1");
  if (!(o.alpha_step > 0.0) || !(o.alpha_max > o.alpha_min)) throw ConfigError("bad alpha range");
  check_writable(o.emit_boundary);
  const auto alphas = numerics::arange_inclusive(o.alpha_min, o.alpha_max, o.alpha_step);
  CsvTable table;
  table.meta = space_meta(space);
  table.header = {"p", "alpha", "w_re", "w_im"};
  json regions = json::array();
  for (double p : o.p) {
    double on_curve = kInf;
    for (double a : alphas) {
      const cplx w = spectrum_boundary_point(space, p, a);
      table.rows.push_back({p, a, w.real(), w.imag()});
      on_curve = std::min(on_curve, std::abs(w));
    }
    regions.push_back({{"p", p},
                       {"gamma", strip_gamma(p)},
                       {"min_modulus", min_modulus_on_spectrum(space, p)},
                       {"min_modulus_grid", min_modulus_on_spectrum_grid(space, p, o.alpha_min, o.alpha_max, o.grid_step)},
                       {"min_modulus_on_emitted_curve", on_curve}});
  }
  if (!o.emit_boundary.empty()) write_text(o.emit_boundary, to_csv(table));
  return {{"regions", regions}};
}

json cmd_counterexample(const Common& c, const CounterOpts& o) {
  const auto space = space_or_config_error(c.space);
  if (!(o.p > 1.0 && o.p < 2.0)) throw ConfigError("--p must lie in (1, 2)");
  if (o.beta == 0.0) throw ConfigError("--beta must be nonzero");
  check_writable(c.out);
  const auto pair = counterexample_pair(space, o.p, o.beta);
  CsvTable table;
  table.meta = space_meta(space);
  table.meta.emplace_back("p", format_number(o.p));
  table.meta.emplace_back("beta", format_number(o.beta));
  table.meta.emplace_back("target_re", format_number(pair.target.real()));
  table.meta.emplace_back("target_im", format_number(pair.target.imag()));
  table.meta.emplace_back("circle_radius", format_number(std::abs(pair.target)));
  table.header = {"exponent", "gamma", "lambda_re", "lambda_im", "w_re", "w_im", "modulus", "phase"};
  const double exps[2] = {pair.q, pair.r};
  const double phases[2] = {pair.theta, pair.psi};
  json terms = json::array();
  for (int i = 0; i < 2; ++i) {
    const cplx lam = pair.f.terms[i].lambda;
    const cplx w = eigenvalue_of(space, lam);
    table.rows.push_back({exps[i], strip_gamma(exps[i]), lam.real(), lam.imag(), w.real(), w.imag(), std::abs(w), phases[i]});
    terms.push_back({{"exponent", exps[i]}, {"lambda", complex_json(lam)}, {"eigenvalue", complex_json(w)}, {"phase", phases[i]}});
  }
  if (!c.out.empty()) write_text(c.out, to_csv(table));
  return {{"p", pair.p},
          {"beta", pair.beta},
          {"q", pair.q},
          {"r", pair.r},
          {"target", complex_json(pair.target)},
          {"circle_radius", std::abs(pair.target)},
          {"theta", pair.theta},
          {"psi", pair.psi},
          {"terms", terms}};
}

json cmd_poisson(const Common& c, const PoissonOpts& o) {
  const auto space = space_or_config_error(c.space);
  if (!space.is_real_hyperbolic()) throw ConfigError("poisson needs a real hyperbolic space H<n>");
  if (o.coeffs.empty()) throw ConfigError("--coeffs must list at least one coefficient");
  if (!(o.tmax > 0.0) || !(o.h > 0.0) || o.ntheta < 1) throw ConfigError("bad grid parameters");
  const cplx lambda = parse_complex(o.lambda);
  check_writable(c.out);
  ZonalBoundary F{space.dim(), {}};
  for (double v : o.coeffs) F.coeffs.emplace_back(v);
  const auto grid = numerics::arange_inclusive(0.0, o.tmax, o.h);
  const auto u = poisson_transform_KM(space, lambda, F, grid, o.ntheta);

  CsvTable table;
  table.meta = space_meta(space);
  table.meta.emplace_back("lambda_re", format_number(lambda.real()));
  table.meta.emplace_back("lambda_im", format_number(lambda.imag()));
  table.header = {"t", "theta", "u_re", "u_im"};
  const auto polar = u.to_polar();
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < u.angles.theta.size(); ++j)
      table.rows.push_back({grid[i], u.angles.theta[j], polar.at(i, j).real(), polar.at(i, j).imag()});
  if (!c.out.empty()) write_text(c.out, to_csv(table));

  const auto probes = numerics::arange_inclusive(0.5, std::max(0.5, std::min(8.0, o.tmax)), 0.25);
  double mode_res = 0.0;
  for (int l = 0; l < static_cast<int>(o.coeffs.size()); ++l)
    if (o.coeffs[l] != 0.0) mode_res = std::max(mode_res, mode_equation_residual(space, lambda, l, probes));
  const auto mv = mean_value_check(u, 1.0, 0.5);
  return {{"lambda", complex_json(lambda)},
          {"rows", table.rows.size()},
          {"max_mode_residual", mode_res},
          {"mean_value_residual", mv.residual},
          {"sup_exp_rho_A2", sup_envelope(u, 2.0, EnvelopeWeight::ExpRho).value}};
}

json cmd_roe(const Common& c, const RoeOpts& o, const CLI::App& sub) {
  const auto space = space_or_config_error(c.space);
  RoeConfig cfg;
  try {
    cfg.kind = norm_kind_from_string(o.norm);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.p_prime = o.pprime;
  cfg.q = o.q;
  cfg.k_min = o.kmin;
  cfg.k_max = o.kmax;
  cfg.truncation_R = o.R;
  cfg.grid_step = o.h;
  cfg.bounded_ratio = o.bounded_ratio;
  cfg.stability_tol = o.stability_tol;
  cfg.eigen_tol = o.eigen_tol;
  auto given = [&](const char* name) { return sub.count(name) > 0; };
  auto default_k = [&](int lo, int hi) {
    if (!given("--kmin")) cfg.k_min = lo;
    if (!given("--kmax")) cfg.k_max = hi;
  };
  const double rho = space.rho();
  std::string preset = o.preset;
  if (preset == "thmB-counterexample") preset = "counterexample";

  EigenCombination f{space, {}};
  cplx z;
  if (preset == "counterexample") {
    if (!(o.p > 1.0 && o.p < 2.0)) throw ConfigError("--p must lie in (1, 2)");
    if (o.beta == 0.0) throw ConfigError("--beta must be nonzero");
    const auto pair = counterexample_pair(space, o.p, o.beta);
    f = pair.f;
    z = std::abs(pair.target);
    if (!given("--pprime")) cfg.p_prime = conjugate_exponent(o.p);
    default_k(0, 20);
  } else if (preset == "eigen") {
    if (o.alpha == 0.0) throw ConfigError("--alpha must be nonzero");
    f.terms = {{1.0, o.alpha}};
    z = o.alpha * o.alpha + rho * rho;
    default_k(-10, 10);
  } else if (preset == "edge") {
    if (!(o.p > 1.0 && o.p <= 2.0)) throw ConfigError("--p must lie in (1, 2]");
    f.terms = {{1.0, cplx(0.0, -gamma_p(o.p) * rho)}};
    z = min_modulus_on_spectrum(space, o.p);
    if (!given("--pprime")) cfg.p_prime = conjugate_exponent(o.p);
    default_k(0, 12);
  } else if (preset == "one-sided") {
    if (o.alpha == 0.0) throw ConfigError("--alpha must be nonzero");
    f = one_sided_pair(space, o.alpha);
    z = o.alpha * o.alpha + rho * rho;
    default_k(-10, 0);
  } else if (preset == "phi0") {
    f.terms = {{1.0, 0.0}};
    z = rho * rho;
    default_k(-2, 2);
  } else if (preset == "custom") {
    if (o.lambda.empty() || o.z.empty()) throw ConfigError("custom roe runs need --lambda and --z");
    for (const auto& s : o.lambda) f.terms.push_back({1.0, parse_complex(s)});
    z = parse_complex(o.z);
  } else {
    throw ConfigError("unknown preset '" + o.preset + "' (counterexample, eigen, edge, one-sided, phi0, custom)");
  }
  if (cfg.k_max < cfg.k_min) throw ConfigError("empty k range");
  check_writable(c.out);
  check_writable(o.per_k);

  const auto rep = roe_verify(f, z, cfg);
  if (!c.out.empty()) {
    json doc = to_json(rep);
    doc["space"] = to_json(space);
    doc["preset"] = preset;
    json terms = json::array();
    for (const auto& t : f.terms) terms.push_back({{"coeff", complex_json(t.coeff)}, {"lambda", complex_json(t.lambda)}});
    doc["terms"] = terms;
    write_text(c.out, doc.dump(2) + "\n");
  }
  if (!o.per_k.empty()) {
    CsvTable table;
    table.meta = space_meta(space);
    table.meta.emplace_back("norm_kind", to_string(rep.norm_kind));
    table.meta.emplace_back("truncation_R", format_number(rep.truncation_R));
    table.header = {"k", "value", "value_half_R"};
    for (std::size_t i = 0; i < rep.per_k_values.size(); ++i)
      table.rows.push_back({static_cast<double>(rep.k_min + static_cast<int>(i)), rep.per_k_values[i], rep.per_k_half[i]});
    write_text(o.per_k, to_csv(table));
  }
  return {{"preset", preset},
          {"z", complex_json(rep.z)},
          {"k_range", {rep.k_min, rep.k_max}},
          {"norm_kind", to_string(rep.norm_kind)},
          {"bound_M", rep.bound_M},
          {"spread", number_or_string(rep.spread)},
          {"growth", number_or_string(rep.growth)},
          {"truncation_drift", rep.truncation_drift},
          {"eigen_residual", rep.eigen_residual},
          {"verdict", to_string(rep.verdict)},
          {"theorem_tag", rep.theorem_tag},
          {"consistent", rep.consistent}};
}

json cmd_euclid(const Common& c, const EuclidOpts& o) {
  std::vector<EuclidTerm> terms;
  for (const auto& s : o.terms) {
    std::vector<double> parts;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) parts.push_back(parse_complex(cell).real());
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("--term expects coeff,omega[,phase], got '" + s + "'");
    terms.push_back({parts[0], parts[1], parts.size() == 3 ? parts[2] : 0.0});
  }
  if (!(o.alpha > 0.0)) throw ConfigError("--alpha must be positive");
  check_writable(c.out);
  EuclidConfig cfg;
  cfg.k_min = o.kmin;
  cfg.k_max = o.kmax;
  cfg.x_max = o.xmax;
  cfg.grid_step = o.h;
  cfg.bounded_ratio = o.bounded_ratio;
  cfg.stability_tol = o.stability_tol;
  cfg.eigen_tol = o.eigen_tol;
  const auto rep = euclid_roe_demo(o.alpha, terms, cfg);
  if (!c.out.empty()) write_text(c.out, to_json(rep).dump(2) + "\n");
  return {{"alpha", o.alpha},
          {"k_range", {rep.k_min, rep.k_max}},
          {"bound_M", rep.bound_M},
          {"growth", number_or_string(rep.growth)},
          {"eigen_residual", rep.eigen_residual},
          {"verdict", to_string(rep.verdict)},
          {"consistent", rep.consistent}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"roekit: spherical functions, Lorentz norms, L^p spectra and Roe sequences on rank-one spaces"};
  app.require_subcommand(1);
  app.footer(kSpaceGrammar);

  Common c;
  SphericalOpts so;
  CfitOpts co;
  NormsOpts no;
  SpectrumOpts sp;
  CounterOpts ce;
  PoissonOpts po;
  RoeOpts ro;
  EuclidOpts eo;

  auto* s_sph = app.add_subcommand("spherical", "Tabulate phi_lambda(a_t); CSV lambda_re,lambda_im,t,phi_re,phi_im");
  add_common(s_sph, c);
  s_sph->add_option("--lambda", so.lambda, "Spectral parameters (complex allowed)")->delimiter(',')->capture_default_str();
  s_sph->add_option("--tmax", so.tmax, "Largest radius")->capture_default_str();
  s_sph->add_option("--step", so.h, "Radial step")->capture_default_str();
  s_sph->add_option("--method", so.method, "ode | n-integral (DR normalization only)")->capture_default_str();
  s_sph->add_option("--rel-tol", so.rel_tol, "ODE relative tolerance")->capture_default_str();
  s_sph->add_option("--abs-tol", so.abs_tol, "ODE absolute tolerance")->capture_default_str();

  auto* s_cfit = app.add_subcommand("cfit", "Fit the large-radius coefficients c(lambda), c(-lambda); JSON output");
  add_common(s_cfit, c);
  s_cfit->add_option("--lambda", co.lambda, "Real nonzero spectral parameters")->delimiter(',')->capture_default_str();
  s_cfit->add_option("--t0", co.t0, "Fit window start")->capture_default_str();
  s_cfit->add_option("--t1", co.t1, "Fit window end (<= t0: automatic)")->capture_default_str();
  s_cfit->add_option("--decay-t0", co.decay_t0, "Decay window start")->capture_default_str();
  s_cfit->add_option("--decay-t1", co.decay_t1, "Decay window end")->capture_default_str();
  s_cfit->add_option("--orders", co.orders, "Correction orders")->capture_default_str();
  s_cfit->add_option("--max-condition", co.max_condition, "Condition number limit")->capture_default_str();

  auto* s_norms = app.add_subcommand("norms", "Truncated Lorentz or ball-average norms of phi_lambda; CSV lambda_re,lambda_im,R,value");
  add_common(s_norms, c);
  s_norms->add_option("--lambda", no.lambda, "Spectral parameters")->delimiter(',')->capture_default_str();
  s_norms->add_option("--p", no.p, "Exponent p")->capture_default_str();
  s_norms->add_option("--q", no.q, "Second index q (number or inf)")->capture_default_str();
  s_norms->add_option("--functional", no.functional, "lorentz | mp")->capture_default_str();
  s_norms->add_option("--rmin", no.rmin, "First truncation radius")->capture_default_str();
  s_norms->add_option("--rmax", no.rmax, "Last truncation radius")->capture_default_str();
  s_norms->add_option("--rstep", no.rstep, "Truncation radius step")->capture_default_str();
  s_norms->add_option("--step", no.h, "Radial grid step")->capture_default_str();

  auto* s_spec = app.add_subcommand("spectrum", "L^p spectrum boundaries; CSV p,alpha,w_re,w_im");
  add_common(s_spec, c, false);
  s_spec->add_option("--p", sp.p, "Exponents p >= 1")->delimiter(',')->capture_default_str();
  s_spec->add_option("--alpha-min", sp.alpha_min, "Boundary parameter start")->capture_default_str();
  s_spec->add_option("--alpha-max", sp.alpha_max, "Boundary parameter end")->capture_default_str();
  s_spec->add_option("--alpha-step", sp.alpha_step, "Boundary parameter step for the emitted curve")->capture_default_str();
  s_spec->add_option("--grid-step", sp.grid_step, "Step of the brute-force minimal-modulus search")->capture_default_str();
  s_spec->add_option("--emit-boundary", sp.emit_boundary, "Boundary CSV path");

  auto* s_ce = app.add_subcommand("counterexample", "Equal-modulus pair of spherical functions; CSV of the two terms");
  add_common(s_ce, c);
  s_ce->add_option("--p", ce.p, "Exponent p in (1, 2)")->capture_default_str();
  s_ce->add_option("--beta", ce.beta, "Real part of the target parameter")->capture_default_str();

  auto* s_poi = app.add_subcommand("poisson", "Poisson transform of zonal boundary data on H^n; CSV t,theta,u_re,u_im");
  add_common(s_poi, c);
  s_poi->add_option("--lambda", po.lambda, "Spectral parameter")->capture_default_str();
  s_poi->add_option("--coeffs", po.coeffs, "Zonal harmonic coefficients of F")->delimiter(',')->capture_default_str();
  s_poi->add_option("--tmax", po.tmax, "Largest radius")->capture_default_str();
  s_poi->add_option("--step", po.h, "Radial step")->capture_default_str();
  s_poi->add_option("--ntheta", po.ntheta, "Angular nodes")->capture_default_str();

  auto* s_roe = app.add_subcommand("roe", "Roe-sequence verification; JSON report");
  add_common(s_roe, c);
  s_roe->add_option("--preset", ro.preset,
                    "counterexample (alias thmB-counterexample) | eigen | edge | one-sided | phi0 | custom")
      ->capture_default_str();
  s_roe->add_option("--lambda", ro.lambda, "custom: spectral parameters (unit coefficients)")->delimiter(',');
  s_roe->add_option("--z", ro.z, "custom: scale z");
  s_roe->add_option("--norm", ro.norm, "weak_pprime | M_pprime | A_pprime_q | sup_phi_ratio | sup_weighted_infty")
      ->capture_default_str();
  s_roe->add_option("--p", ro.p, "Exponent p for counterexample/edge presets")->capture_default_str();
  s_roe->add_option("--beta", ro.beta, "Target real part for the counterexample preset")->capture_default_str();
  s_roe->add_option("--alpha", ro.alpha, "alpha for eigen/one-sided presets")->capture_default_str();
  s_roe->add_option("--pprime", ro.pprime, "Conjugate exponent used by the functional")->capture_default_str();
  s_roe->add_option("--q", ro.q, "Angular exponent for A_pprime_q")->capture_default_str();
  s_roe->add_option("--kmin", ro.kmin, "First power");
  s_roe->add_option("--kmax", ro.kmax, "Last power");
  s_roe->add_option("--R", ro.R, "Truncation radius")->capture_default_str();
  s_roe->add_option("--step", ro.h, "Radial grid step")->capture_default_str();
  s_roe->add_option("--bounded-ratio", ro.bounded_ratio, "Growth ratio above which the sequence is unbounded")
      ->capture_default_str();
  s_roe->add_option("--stability-tol", ro.stability_tol, "Allowed relative change from R/2 to R")->capture_default_str();
  s_roe->add_option("--eigen-tol", ro.eigen_tol, "Residual below which f counts as an eigenfunction")
      ->capture_default_str();
  s_roe->add_option("--per-k", ro.per_k, "CSV path for k,value,value_half_R");

  auto* s_eu = app.add_subcommand("euclid", "Euclidean baseline on the line; JSON report");
  add_common(s_eu, c);
  s_eu->add_option("--alpha", eo.alpha, "Scale alpha > 0")->capture_default_str();
  s_eu->add_option("--term", eo.terms, "coeff,omega[,phase], repeatable")->capture_default_str();
  s_eu->add_option("--kmin", eo.kmin, "First power")->capture_default_str();
  s_eu->add_option("--kmax", eo.kmax, "Last power")->capture_default_str();
  s_eu->add_option("--xmax", eo.xmax, "Sup-norm window [0, xmax]")->capture_default_str();
  s_eu->add_option("--step", eo.h, "Grid step")->capture_default_str();
  s_eu->add_option("--bounded-ratio", eo.bounded_ratio, "Growth ratio above which the sequence is unbounded")
      ->capture_default_str();
  s_eu->add_option("--stability-tol", eo.stability_tol, "Allowed relative change from xmax/2 to xmax")
      ->capture_default_str();
  s_eu->add_option("--eigen-tol", eo.eigen_tol, "Residual below which f counts as an eigenfunction")
      ->capture_default_str();

  std::vector<std::string> argv_store = {"roekit"};
  try {
    const auto expanded = expand_config(args);
    argv_store.insert(argv_store.end(), expanded.begin(), expanded.end());
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  json summary = {{"subcommand", name}};
  try {
    if (c.selftest) {
      Selftest st;
      if (name == "spherical") selftest_spherical(st);
      else if (name == "cfit") selftest_cfit(st);
      else if (name == "norms") selftest_norms(st);
      else if (name == "spectrum") selftest_spectrum(st);
      else if (name == "counterexample") selftest_counterexample(st);
      else if (name == "poisson") selftest_poisson(st);
      else if (name == "roe") selftest_roe(st);
      else selftest_euclid(st);
      summary["selftest"] = true;
      summary["passed"] = st.passed;
      summary["failed"] = st.failures.size();
      summary["failures"] = st.failures;
      out << summary.dump() << '\n';
      return st.failures.empty() ? kExitOk : kExitSelftest;
    }
    json body;
    if (name == "spherical") body = cmd_spherical(c, so);
    else if (name == "cfit") body = cmd_cfit(c, co);
    else if (name == "norms") body = cmd_norms(c, no);
    else if (name == "spectrum") body = cmd_spectrum(c, sp);
    else if (name == "counterexample") body = cmd_counterexample(c, ce);
    else if (name == "poisson") body = cmd_poisson(c, po);
    else if (name == "roe") body = cmd_roe(c, ro, *sub);
    else body = cmd_euclid(c, eo);
    if (name != "euclid") summary["space"] = parse_space(c.space).label();
    summary.update(body);
    const std::string path = name == "spectrum" ? sp.emit_boundary : c.out;
    summary["out"] = path.empty() ? json(nullptr) : json(path);
    summary["status"] = "ok";
    out << summary.dump() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    summary["status"] = "config_error";
    summary["message"] = e.what();
    out << summary.dump() << '\n';
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    summary["status"] = "config_error";
    summary["message"] = e.what();
    out << summary.dump() << '\n';
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    summary["status"] = "config_error";
    summary["message"] = e.what();
    out << summary.dump() << '\n';
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    summary["status"] = "numerical_failure";
    summary["message"] = e.what();
    out << summary.dump() << '\n';
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace roekit::cli
