#include "corner/geometry/rhs.hpp"

#include <cmath>

#include "corner/error.hpp"
#include "corner/spectral/basis.hpp"

namespace corner::geometry {

double RadialBump::operator()(double r) const {
    if (!(r > a && r < b)) return 0.0;
    const double x = (2.0 * r - a - b) / (b - a);
    const double q = 1.0 - x * x;
    if (shape == BumpShape::c2) return q * q * q;
    return std::exp(1.0 - 1.0 / q);
}

RhsSpec default_rhs(const GeneratingTriple &t) {
    RhsSpec s;
    s.f.profile = {0.5 * t.r0, t.r0, BumpShape::c2};
    s.F.profile = {t.R0, 2.0 * t.R0, BumpShape::c2};
    return s;
}

void validate_rhs(const RhsSpec &rhs, const GeneratingTriple &t, int J) {
    const double tol = 1e-12;
    if (rhs.f.active()) {
        if (!(rhs.f.profile.a < rhs.f.profile.b)) throw ValidationError("f profile support is empty");
        if (rhs.f.profile.a < 0.5 * t.r0 * (1 - tol) || rhs.f.profile.b > t.r0 * (1 + tol))
            throw ValidationError("f must be supported in (r0/2, r0)");
        if (rhs.kind == RhsKind::modal && (rhs.f.mode < 1 || rhs.f.mode > J)) throw ValidationError("f mode outside 1..J");
    }
    if (rhs.F.active()) {
        if (!(rhs.F.profile.a < rhs.F.profile.b)) throw ValidationError("F profile support is empty");
        if (rhs.F.profile.a < t.R0 * (1 - tol) || rhs.F.profile.b > 2.0 * t.R0 * (1 + tol))
            throw ValidationError("F must be supported in (R0, 2R0)");
        if (rhs.kind == RhsKind::modal && (rhs.F.mode < 1 || rhs.F.mode > J)) throw ValidationError("F mode outside 1..J");
    }
}

double angular_profile(const RhsSpec &rhs, const RhsComponent &c, const spectral::SpectralBasis &basis, double omega,
                       double theta) {
    if (rhs.kind == RhsKind::modal) return basis.psi(c.mode, theta);
    const double s = theta / omega;
    return 16.0 * s * s * (1.0 - s) * (1.0 - s);
}

double eval_f(const RhsSpec &rhs, const spectral::SpectralBasis &basis, double omega, double r, double theta) {
    if (!rhs.f.active()) return 0.0;
    const double g = rhs.f.profile(r);
    if (g == 0.0) return 0.0;
    return rhs.f.amplitude * g * angular_profile(rhs, rhs.f, basis, omega, theta);
}

double eval_F(const RhsSpec &rhs, const spectral::SpectralBasis &basis, double omega, double R, double theta) {
    if (!rhs.F.active()) return 0.0;
    const double g = rhs.F.profile(R);
    if (g == 0.0) return 0.0;
    return rhs.F.amplitude * g * angular_profile(rhs, rhs.F, basis, omega, theta);
}

}  // namespace corner::geometry
