#include "corner/spectral/kelvin.hpp"

#include "corner/error.hpp"

namespace corner::spectral {

solver::GridField kelvin_transform(const solver::GridField &field, double rho) {
    if (!(rho > 0.0)) throw PreconditionError("Kelvin radius must be positive");
    return field.reflected(rho);
}

}  // namespace corner::spectral
