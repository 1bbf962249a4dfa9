#include "corner/geometry/cutoff.hpp"

#include <cmath>
#include <numbers>

#include "corner/error.hpp"

namespace corner::geometry {

namespace {

struct Step {
    double v, d1, d2;
};

Step smoothstep(double s) {
    if (s <= 0.0) return {0.0, 0.0, 0.0};
    if (s >= 1.0) return {1.0, 0.0, 0.0};
    const double s2 = s * s;
    return {s2 * s * (10.0 - 15.0 * s + 6.0 * s2), 30.0 * s2 * (1.0 - s) * (1.0 - s), 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)};
}

}  // namespace

Cutoffs::Cutoffs(double r0, double R0, double width) : r0_(r0), R0_(R0), width_(width) {
    if (!(r0 > 0.0) || !(R0 > 0.0)) throw ValidationError("cutoff radii must be positive");
    if (!(width > 0.0) || width > 1.0) throw ValidationError("cutoff transition width must lie in (0, 1]");
}

std::pair<double, double> Cutoffs::transition(CutoffKind which) const {
    if (which == CutoffKind::Phi) return {R0_, R0_ * std::exp2(width_)};
    return {r0_ * std::exp2(-width_), r0_};
}

LogDerivs Cutoffs::log_derivs(CutoffKind which, double t) const {
    const double L = width_ * std::numbers::ln2;
    if (which == CutoffKind::Phi) {
        Step st = smoothstep((t - std::log(R0_)) / L);
        return {st.v, st.d1 / L, st.d2 / (L * L)};
    }
    Step st = smoothstep((t - std::log(r0_) + L) / L);
    return {1.0 - st.v, -st.d1 / L, -st.d2 / (L * L)};
}

double Cutoffs::eval(CutoffKind which, double r, int order) const {
    if (!(r > 0.0)) throw PreconditionError("cutoff evaluation requires r > 0");
    LogDerivs d = log_derivs(which, std::log(r));
    switch (order) {
        case 0:
            return d.v;
        case 1:
            return d.dt / r;
        case 2:
            return (d.dtt - d.dt) / (r * r);
        default:
            throw PreconditionError("cutoff derivative order must be 0, 1 or 2");
    }
}

double cutoff_eval(const Cutoffs &c, CutoffKind which, double r, int order) { return c.eval(which, r, order); }

}  // namespace corner::geometry
