#pragma once

// Measure geometry of rank-one symmetric spaces and Damek-Ricci spaces.

#include <string>
#include <string_view>
#include <variant>

namespace roekit {

/// Which polar density and rho formula is in force. Symmetric uses the root
/// normalization gamma(1) = 1; DR uses the NA-group metric with rho = Q/2.
enum class Normalization { Symmetric, DamekRicci };

struct SymmetricRankOne {
  int m_gamma = 0;
  int m_2gamma = 0;
};

struct DamekRicci {
  int m = 0;  // dim of v
  int l = 0;  // dim of the centre z
};

struct RealHyperbolic {
  int n = 0;
};

using SpaceKind = std::variant<SymmetricRankOne, DamekRicci, RealHyperbolic>;

/// Immutable space description. RealHyperbolic(n) is stored as
/// SymmetricRankOne(n-1, 0).
class SpaceParams {
 public:
  Normalization normalization() const { return norm_; }
  double rho() const { return rho_; }
  /// Homogeneous dimension; always 2 * rho.
  double Q() const { return 2.0 * rho_; }
  int dim() const { return dim_; }

  /// Multiplicities: (m_gamma, m_2gamma) for Symmetric, (m, l) for DR.
  int first_multiplicity() const { return a_; }
  int second_multiplicity() const { return b_; }

  /// True for SymmetricRankOne(n-1, 0), i.e. real hyperbolic space H^n.
  bool is_real_hyperbolic() const { return norm_ == Normalization::Symmetric && b_ == 0; }

  /// Polar density J(r); leading constant 1 (Symmetric) or 2^m (DR).
  double density(double r) const;
  /// log J(r) for r > 0.
  double log_density(double r) const;
  /// J'(r)/J(r) for r > 0.
  double density_log_derivative(double r) const;
  /// Coefficient kappa in J'/J = (d-1)/r + kappa r + O(r^3).
  double density_log_derivative_linear_term() const;

  /// Short human-readable label, e.g. "sym:2,0" or "dr:2,1".
  std::string label() const;

  bool operator==(const SpaceParams&) const = default;

 private:
  friend SpaceParams make_space(const SpaceKind& kind);
  Normalization norm_ = Normalization::Symmetric;
  int a_ = 0;
  int b_ = 0;
  int dim_ = 0;
  double rho_ = 0.0;
};

/// Validates the kind and populates all derived fields. Throws
/// std::invalid_argument on odd m for DR with l > 0, on negative
/// multiplicities and on zero-dimensional input.
SpaceParams make_space(const SpaceKind& kind);

/// gamma_p = 2/p - 1 for p in (0, 2].
double gamma_p(double p);

/// Conjugate exponent p/(p-1) (p > 1).
double conjugate_exponent(double p);

/// Haar measure of the geodesic ball B(0, R) (normalized angular measure).
double ball_volume(const SpaceParams& space, double R);

/// Parses a space specification:
///
///   H<n>                real hyperbolic space, e.g. "H3"
///   sym:<mg>,<m2g>      rank-one symmetric space from root multiplicities
///   dr:<m>,<l>          Damek-Ricci space with dim v = m, dim z = l
///
/// optionally followed by ";norm=sym" or ";norm=dr". The suffix selects the
/// metric normalization; the multiplicities carry over unchanged (so
/// "H3;norm=dr" is dr:2,0 and "dr:2,1;norm=sym" is sym:2,1).
SpaceParams parse_space(std::string_view spec);

}  // namespace roekit
