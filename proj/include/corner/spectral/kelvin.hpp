#pragma once

#include "corner/solver/grid.hpp"

namespace corner::spectral {

// Kelvin transform about the circle of radius rho in the plane:
// K[u](x) = u(rho^2 x / |x|^2). Maps h_j^+ to rho^{2 lambda_j^+} h_j^- and
// swaps the Omega / P roles of the field.
solver::GridField kelvin_transform(const solver::GridField &field, double rho);

}  // namespace corner::spectral
