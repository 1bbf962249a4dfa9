#pragma once

#include <string>

#include "corner/geometry/triple.hpp"

namespace corner::spectral {
class SpectralBasis;
}

namespace corner::geometry {

enum class RhsKind { modal, gridded };
enum class BumpShape { c2, smooth };

// (1 - x^2)^3 (c2) or exp(1 - 1/(1 - x^2)) (smooth) on (a, b), x = (2r - a - b)/(b - a).
struct RadialBump {
    double a = 0.0;
    double b = 0.0;
    BumpShape shape = BumpShape::c2;

    double operator()(double r) const;
};

// amplitude * g(r) * psi_mode(theta) (modal) or amplitude * g(r) * chi(theta) (gridded,
// chi = 16 s^2 (1 - s)^2 with s = theta/omega).
struct RhsComponent {
    int mode = 1;
    RadialBump profile;
    double amplitude = 0.0;

    bool active() const { return amplitude != 0.0; }
};

struct RhsSpec {
    RhsKind kind = RhsKind::modal;
    RhsComponent f;  // slow data, support in (r0/2, r0)
    RhsComponent F;  // pattern data, support in (R0, 2R0)

    bool is_zero() const { return !f.active() && !F.active(); }
};

// Default profiles: f on (r0/2, r0) and F on (R0, 2R0), both inactive.
RhsSpec default_rhs(const GeneratingTriple &t);

// Support constraints: f must vanish for r < r0/2, F for R > 2R0.
void validate_rhs(const RhsSpec &rhs, const GeneratingTriple &t, int J);

double angular_profile(const RhsSpec &rhs, const RhsComponent &c, const spectral::SpectralBasis &basis, double omega,
                       double theta);
double eval_f(const RhsSpec &rhs, const spectral::SpectralBasis &basis, double omega, double r, double theta);
double eval_F(const RhsSpec &rhs, const spectral::SpectralBasis &basis, double omega, double R, double theta);

}  // namespace corner::geometry
