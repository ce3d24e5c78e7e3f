#pragma once

// Distribution functions, decreasing rearrangements, Lorentz quasi-norms and
// the ball-average / angular-mean size functionals on the polar measure
// J(r) dr dsigma of a space.
//
// Tabulated functions are read as the linear interpolant of |f| between
// radial nodes. Every functional takes an explicit truncation radius and
// only sees f on B(0, R).

#include <limits>
#include <utility>
#include <vector>

#include "roekit/numerics.hpp"
#include "roekit/space.hpp"

namespace roekit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct RadialGridFunction {
  SpaceParams space;
  std::vector<double> r;
  std::vector<cplx> values;

  /// Throws std::invalid_argument unless the grid starts at >= 0, strictly
  /// increases and all values are finite.
  void validate() const;
  double r_max() const { return r.back(); }
};

/// Angular quadrature on [0, pi] for the zonal measure sin^{d-2}(theta) dtheta,
/// normalized to total mass 1 and sorted by increasing theta.
struct AngularRule {
  std::vector<double> theta;
  std::vector<double> weights;
};

/// Gauss-Gegenbauer rule in cos(theta); exact for zonal harmonics of degree < 2n.
AngularRule angular_rule(int dim, int n);

struct PolarGridFunction {
  SpaceParams space;
  std::vector<double> r;
  AngularRule angles;
  /// values[i * angles.theta.size() + j] = u(r_i, theta_j)
  std::vector<cplx> values;

  cplx at(std::size_t i, std::size_t j) const { return values[i * angles.theta.size() + j]; }
  void validate() const;
};

struct LorentzEstimate {
  double p = 0.0;
  double q = 0.0;
  double truncation_R = 0.0;
  double value = 0.0;
  /// log(value(R) / value(R')) / log(R / R') with R' the comparison radius.
  double tail_slope = 0.0;
  /// (R, value) pairs behind the estimate.
  std::vector<std::pair<double, double>> sequence;
};

struct LorentzOptions {
  /// Sub-cells per grid cell in the level decomposition.
  int subdivisions = 8;
};

/// Measure of {r <= R : |f(r)| > s} (R defaults to the end of the grid).
double distribution_function(const RadialGridFunction& f, double s, double R = kInf);

/// f*(t) = inf{s : d_f(s) <= t}, by bisection on the tabulated d_f.
double rearrangement(const RadialGridFunction& f, double t, double R = kInf);

/// ||f chi_{B(0,R)}||_{p,q} for 1 < p < inf, 1 <= q <= inf; the tail slope
/// compares R with R/2.
LorentzEstimate lorentz_norm(const RadialGridFunction& f, double p, double q, double R,
                             const LorentzOptions& opt = {});

/// The same quasi-norm for a zonal function on the product measure
/// J(r) dr x dsigma(theta).
LorentzEstimate lorentz_norm(const PolarGridFunction& u, double p, double q, double R,
                             const LorentzOptions& opt = {});

/// Direct quadrature (int_{B(0,R)} |f|^p)^{1/p}.
double lp_norm(const RadialGridFunction& f, double p, double R);

/// Ball averages ((1/R) int_{B(0,R)} |f|^p)^{1/p} along an increasing schedule;
/// value is the max over the tail half of the schedule and tail_slope compares
/// the last radius with the schedule entry nearest half of it.
LorentzEstimate m_p(const RadialGridFunction& f, double p, const std::vector<double>& R_schedule);

/// Angular q-mean A_q(u)(r) = (int |u(r, .)|^q dsigma)^{1/q} (q = inf: max).
RadialGridFunction angular_mean(const PolarGridFunction& u, double q);

/// A_{p,q}(u) = ||A_q(u)||_{p,inf} truncated at R.
LorentzEstimate a_pq(const PolarGridFunction& u, double p, double q, double R, const LorentzOptions& opt = {});

/// Angular average with the normalized zonal measure.
RadialGridFunction radialize(const PolarGridFunction& u);

/// Tabulates a radial function as a polar one (constant in theta).
PolarGridFunction to_polar(const RadialGridFunction& f, int n_theta);

}  // namespace roekit
