#pragma once

#include <utility>

namespace corner::geometry {

enum class CutoffKind { Phi, phi };

// Value and derivatives with respect to t = ln r.
struct LogDerivs {
    double v = 0.0;
    double dt = 0.0;
    double dtt = 0.0;
};

// Phi = 0 on [0, R0], 1 on [R0 2^w, inf); phi = 1 on [0, r0 2^-w], 0 on [r0, inf).
// Both are the quintic smoothstep 6s^5 - 15s^4 + 10s^3 in s linear in ln r.
// The default width w = 1 gives the transition annuli (R0, 2R0) and (r0/2, r0).
class Cutoffs {
public:
    Cutoffs() = default;
    Cutoffs(double r0, double R0, double width = 1.0);

    double r0() const { return r0_; }
    double R0() const { return R0_; }
    double width() const { return width_; }

    LogDerivs log_derivs(CutoffKind which, double t) const;
    // Radial derivative of order 0, 1 or 2.
    double eval(CutoffKind which, double r, int order) const;
    // Inner and outer radius of the transition annulus.
    std::pair<double, double> transition(CutoffKind which) const;

private:
    double r0_ = 1.0;
    double R0_ = 1.0;
    double width_ = 1.0;
};

double cutoff_eval(const Cutoffs &c, CutoffKind which, double r, int order);

}  // namespace corner::geometry
