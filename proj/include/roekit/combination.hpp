#pragma once

// Finite linear combinations of spherical functions, on which the
// Laplace-Beltrami operator acts exactly.

#include <vector>

#include "roekit/numerics.hpp"
#include "roekit/space.hpp"
#include "roekit/spherical.hpp"

namespace roekit {

struct EigenTerm {
  cplx coeff;
  cplx lambda;
};

struct EigenCombination {
  SpaceParams space;
  std::vector<EigenTerm> terms;

  /// sum_i coeff_i phi_{lambda_i}(a_t) on an ascending grid.
  std::vector<cplx> evaluate(const std::vector<double>& t_grid) const;
};

}  // namespace roekit
