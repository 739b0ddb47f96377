#ifndef SPATIALREG_SAR_HPP
#define SPATIALREG_SAR_HPP

#include "spatialreg/weights.hpp"

namespace spatialreg {

// Solves the simultaneous-lag system (I - rho W) y = rhs, i.e. the reduced
// form of y = rho W y + rhs. Requires |rho| < 1.
Vector solve_simultaneous_lag(const SpatialWeights& w, double rho, const Vector& rhs);

} // namespace spatialreg

#endif
