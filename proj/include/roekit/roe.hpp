#pragma once

// Roe-sequence engine: exact Laplacian powers of finite eigenfunction
// combinations, per-power size functionals, and the resulting verdicts.

#include <string>
#include <vector>

#include "roekit/combination.hpp"
#include "roekit/lorentz.hpp"
#include "roekit/numerics.hpp"
#include "roekit/space.hpp"

namespace roekit {

/// Delta^k f: coefficients multiplied by Lambda(lambda_i)^k. Throws
/// std::domain_error for k < 0 when some Lambda(lambda_i) = 0.
EigenCombination laplacian_power(const EigenCombination& f, int k);

/// sup |Delta f - w f| / sup |f| over the radial probe grid.
double eigen_residual(const EigenCombination& f, cplx w, const std::vector<double>& probe_grid);

/// Sup is the plain sup norm used by the Euclidean baseline.
enum class NormKind { WeakPPrime, MPPrime, APPrimeQ, SupPhiRatio, SupWeightedInfty, Sup };
enum class Verdict { Eigenfunction, BoundedNotEigen, Unbounded };

const char* to_string(NormKind kind);
const char* to_string(Verdict verdict);
NormKind norm_kind_from_string(const std::string& s);

struct RoeConfig {
  NormKind kind = NormKind::WeakPPrime;
  double p_prime = 2.0;
  /// Angular exponent for APPrimeQ.
  double q = 2.0;
  int k_min = 0;
  int k_max = 10;
  double truncation_R = 40.0;
  double grid_step = 0.01;
  /// Max over k relative to the value at the k nearest 0 above which the
  /// sequence counts as unbounded.
  double bounded_ratio = 10.0;
  /// Allowed relative change between truncation R/2 and R.
  double stability_tol = 0.1;
  double eigen_tol = 1e-4;
  /// SupPhiRatio skips nodes where |phi_weight| < weight_floor * phi_0.
  double weight_floor = 1e-6;
};

struct RoeReport {
  cplx z;
  int k_min = 0;
  int k_max = 0;
  NormKind norm_kind = NormKind::WeakPPrime;
  double truncation_R = 0.0;
  std::vector<double> per_k_values;
  /// Same functional at truncation R/2.
  std::vector<double> per_k_half;
  double bound_M = 0.0;
  /// max/min of per_k_values
  double spread = 0.0;
  /// max of per_k_values over the value at the k nearest 0
  double growth = 0.0;
  /// max over k of |value(R) - value(R/2)| / value(R)
  double truncation_drift = 0.0;
  bool bounded = false;
  double eigen_residual = 0.0;
  Verdict verdict = Verdict::Unbounded;
  /// Which statement the instance exercises, by role (see README).
  std::string theorem_tag;
  /// Whether the verdict agrees with that statement's prediction.
  bool consistent = true;
};

/// Runs the Roe check of f with scale z: for each k the chosen functional of
/// Delta^k f / z^k, truncation stability, residual against -|z|, verdict and tag.
RoeReport roe_verify(const EigenCombination& f, cplx z, const RoeConfig& config);

struct EuclidTerm {
  double coeff = 1.0;
  double omega = 1.0;
  double phase = 0.0;
};

struct EuclidConfig {
  int k_min = -10;
  int k_max = 10;
  double x_max = 200.0;
  double grid_step = 0.01;
  double bounded_ratio = 10.0;
  double stability_tol = 0.1;
  double eigen_tol = 1e-4;
};

/// One-dimensional Euclidean baseline: f = sum c_j sin(omega_j x + phase_j),
/// Delta^k f = sum c_j (-omega_j^2)^k sin(...), sup norm of Delta^k f / alpha^k.
RoeReport euclid_roe_demo(double alpha, const std::vector<EuclidTerm>& terms, const EuclidConfig& config = {});

}  // namespace roekit
