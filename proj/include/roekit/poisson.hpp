#pragma once

// Poisson kernels and transforms: the N-picture kernel on Damek-Ricci spaces
// and the compact-picture transform of zonal boundary data on H^n.

#include <vector>

#include "roekit/lorentz.hpp"
#include "roekit/numerics.hpp"
#include "roekit/space.hpp"
#include "roekit/spherical.hpp"

namespace roekit {

// ---- N picture (DR normalization) ----

/// int_N P_{a_t}(n) dn for the kernel with constant C.
double poisson_mass(const SpaceParams& space, double t, double C);

/// The constant C making P_a a probability density on N. Cached per space.
double normalize_C(const SpaceParams& space);

/// P_{a_t}(X, Y) = C e^{Qt} ((e^t + |X|^2/4)^2 + |Y|^2)^{-Q} with C = normalize_C(space).
double poisson_kernel_N(const SpaceParams& space, double t, double xnorm, double ynorm);

// ---- compact picture on H^n ----

/// Zonal harmonic Z_l(x) = C_l^a(x) / C_l^a(1), a = (n-2)/2, for l = 0..l_max
/// (Chebyshev T_l when n = 2).
std::vector<double> zonal_harmonics(int n, int l_max, double x);

/// Boundary function on the sphere S^{n-1} depending only on the polar angle,
/// stored by its zonal-harmonic coefficients: F(theta) = sum_l coeffs[l] Z_l(cos theta).
struct ZonalBoundary {
  int n = 0;
  std::vector<cplx> coeffs;

  cplx operator()(double theta) const;
};

/// Projects samples of F onto zonal harmonics of degree <= l_max using a
/// Gauss rule exact for the products involved.
template <class F>
ZonalBoundary zonal_from_function(int n, int l_max, F&& f);

/// Funk-Hecke profile int (cosh t - sinh t cos phi)^{-(i lambda + rho)} Z_l(cos phi) dsigma(phi).
cplx mode_profile(const SpaceParams& space, cplx lambda, int l, double t);

struct PoissonField {
  SpaceParams space;
  SpectralPoint lambda;
  ZonalBoundary boundary;
  std::vector<double> t;
  AngularRule angles;
  /// profiles[l][i] = mode_profile(space, lambda, l, t[i])
  std::vector<std::vector<cplx>> profiles;
  /// values[i * angles.theta.size() + j] = u(t_i, theta_j)
  std::vector<cplx> values;

  /// u at an arbitrary point (radius t, polar angle theta), recomputing the
  /// mode profiles by quadrature.
  cplx evaluate(double t, double theta) const;
  PolarGridFunction to_polar() const;
};

/// Default angular order: exact for zonal harmonics up to degree 16 squared.
inline constexpr int kPoissonAngularNodes = 34;

/// P_lambda F(a_t k_theta) on a tensor (t, theta) grid; requires a real
/// hyperbolic space in symmetric normalization.
PoissonField poisson_transform_KM(const SpaceParams& space, cplx lambda, const ZonalBoundary& F,
                                  const std::vector<double>& t_grid, int n_theta = kPoissonAngularNodes);

/// Finite-difference check of the l-th mode equation
/// Phi'' + (n-1) coth t Phi' - l(l+n-2)/sinh^2 t Phi = -(lambda^2 + rho^2) Phi
/// at the given radii (step h). Returns max |residual| e^{rho t} / max |Phi| e^{rho t}.
double mode_equation_residual(const SpaceParams& space, cplx lambda, int l, const std::vector<double>& t_points,
                              double h = 1e-3);

struct MeanValueResult {
  cplx lhs;  // spherical average of u over the sphere of radius r about g
  cplx rhs;  // u(g) phi_lambda(r)
  double residual = 0.0;
};

/// Compares int_K u(g k x) dk with u(g) phi_lambda(x) for g = a_s on the
/// polar axis and |x| = r.
MeanValueResult mean_value_check(const PoissonField& u, double s, double r, int n_beta = 48);

enum class EnvelopeWeight { ExpRho, InversePhi };

struct SupEnvelope {
  double value = 0.0;
  double argmax_t = 0.0;
};

/// sup_t weight(t) A_q(u)(t) over the tabulated radii; InversePhi uses
/// 1/phi_{i gamma_p rho}(a_t).
SupEnvelope sup_envelope(const PoissonField& u, double q, EnvelopeWeight weight, double p = 2.0);

// ---- implementation of the template ----

template <class F>
ZonalBoundary zonal_from_function(int n, int l_max, F&& f) {
  if (n < 2 || l_max < 0) throw std::invalid_argument("zonal_from_function: bad arguments");
  const auto rule = numerics::gauss_gegenbauer(l_max + 8, 0.5 * (n - 2));
  ZonalBoundary out{n, std::vector<cplx>(l_max + 1)};
  std::vector<double> norms(l_max + 1, 0.0);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double x = rule.nodes[k];
    const auto z = zonal_harmonics(n, l_max, x);
    const cplx fv = f(std::acos(x));
    for (int l = 0; l <= l_max; ++l) {
      out.coeffs[l] += rule.weights[k] * fv * z[l];
      norms[l] += rule.weights[k] * z[l] * z[l];
    }
  }
  for (int l = 0; l <= l_max; ++l) out.coeffs[l] /= norms[l];
  return out;
}

}  // namespace roekit
