#include "corner/geometry/triple.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "corner/error.hpp"

namespace corner::geometry {

std::string to_string(Family f) { return f == Family::annular_exact ? "annular_exact" : "radial_graph"; }

BoundaryCurve BoundaryCurve::constant(double radius) {
    BoundaryCurve c;
    c.constant_ = radius;
    std::ostringstream os;
    os << "constant " << radius;
    c.description_ = os.str();
    return c;
}

BoundaryCurve::BoundaryCurve(std::function<double(double)> rho, std::string description)
    : rho_(std::move(rho)), description_(std::move(description)) {}

std::pair<double, double> BoundaryCurve::range(double omega, int samples) const {
    if (constant_) return {*constant_, *constant_};
    double lo = INFINITY;
    double hi = -INFINITY;
    for (int i = 0; i <= samples; ++i) {
        double v = (*this)(omega * i / samples);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

BoundaryCurve sampled_curve(std::vector<double> theta, std::vector<double> r) {
    const std::size_t n = theta.size();
    if (n < 2 || r.size() != n) throw ValidationError("sampled boundary needs at least two (theta, r) pairs");
    for (std::size_t i = 1; i < n; ++i)
        if (!(theta[i] > theta[i - 1])) throw ValidationError("sampled boundary angles must increase");
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (r[i + 1] - r[i]) / (theta[i + 1] - theta[i]);
    std::vector<double> m(n);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) m[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m[i] = m[i + 1] = 0.0;
            continue;
        }
        double a = m[i] / d[i];
        double b = m[i + 1] / d[i];
        double s = a * a + b * b;
        if (s > 9.0) {
            double tau = 3.0 / std::sqrt(s);
            m[i] = tau * a * d[i];
            m[i + 1] = tau * b * d[i];
        }
    }
    auto f = [theta = std::move(theta), r = std::move(r), m = std::move(m)](double x) {
        const std::size_t n = theta.size();
        if (x <= theta.front()) return r.front();
        if (x >= theta.back()) return r.back();
        std::size_t k = static_cast<std::size_t>(std::upper_bound(theta.begin(), theta.end(), x) - theta.begin()) - 1;
        k = std::min(k, n - 2);
        double h = theta[k + 1] - theta[k];
        double s = (x - theta[k]) / h;
        double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        double h10 = s * (1 - s) * (1 - s);
        double h01 = s * s * (3 - 2 * s);
        double h11 = s * s * (s - 1);
        return h00 * r[k] + h10 * h * m[k] + h01 * r[k + 1] + h11 * h * m[k + 1];
    };
    return BoundaryCurve(f, "sampled table");
}

TripleReport validate_triple(const GeneratingTriple &t) {
    if (!(t.omega > 0.0) || t.omega > 2.0 * std::numbers::pi * (1.0 + 1e-15))
        throw ValidationError("opening angle must lie in (0, 2pi]");
    if (!(t.r0 > 0.0) || !(t.R0 > 0.0)) throw ValidationError("matching radii r0 and R0 must be positive");
    const int samples = 4096;
    for (int i = 0; i <= samples; ++i) {
        const double th = t.omega * i / samples;
        const double ro = t.rho_omega(th);
        const double rp = t.rho_p(th);
        if (!std::isfinite(ro) || !std::isfinite(rp))
            throw ValidationError("boundary radius is not finite at theta = " + std::to_string(th));
        if (ro < t.r0 * (1.0 - 1e-12)) {
            std::ostringstream os;
            os << "outer boundary of Omega enters the matching ball: rho_Omega(" << th << ") = " << ro << " < r0 = " << t.r0;
            throw ValidationError(os.str());
        }
        if (!(rp > 0.0)) throw ValidationError("pattern boundary radius must be positive");
        if (rp > t.R0 * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "pattern boundary outside matching ball: rho_P(" << th << ") = " << rp << " > R0 = " << t.R0;
            throw ValidationError(os.str());
        }
    }
    const bool circular = t.rho_omega.is_constant() && std::abs(*t.rho_omega.constant_value() - t.r0) == 0.0 &&
                          t.rho_p.is_constant() && std::abs(*t.rho_p.constant_value() - t.R0) == 0.0;
    if (t.family == Family::annular_exact && !circular)
        throw ValidationError("annular_exact family requires rho_Omega = r0 and rho_P = R0");
    TripleReport rep;
    rep.eps0 = t.eps0();
    rep.eps_max = t.eps_max();
    if (t.family == Family::radial_graph && circular) rep.notes.push_back("radial_graph triple is circular; annular_exact applies");
    return rep;
}

bool omega_eps_contains(const GeneratingTriple &t, double eps, double r, double theta) {
    if (!(eps > 0.0) || eps > t.eps0()) throw PreconditionError("eps must lie in (0, eps0]");
    if (!(theta > 0.0 && theta < t.omega)) return false;
    return eps * t.rho_p(theta) < r && r < t.rho_omega(theta);
}

GeneratingTriple annulus(double omega, double r0, double R0) {
    GeneratingTriple t;
    t.omega = omega;
    t.r0 = r0;
    t.R0 = R0;
    t.rho_omega = BoundaryCurve::constant(r0);
    t.rho_p = BoundaryCurve::constant(R0);
    t.family = Family::annular_exact;
    t.name = "annulus";
    return t;
}

GeneratingTriple annulus_exact(const gps::Rational &omega_over_pi, double r0, double R0) {
    GeneratingTriple t = annulus(omega_over_pi.value() * std::numbers::pi, r0, R0);
    t.omega_over_pi = omega_over_pi;
    return t;
}

GeneratingTriple rounded_corner(double omega, double fillet, double r0, double R0) {
    if (!(fillet > 0.0)) throw ValidationError("fillet radius must be positive");
    GeneratingTriple t;
    t.omega = omega;
    t.r0 = r0;
    t.R0 = R0;
    t.rho_omega = BoundaryCurve::constant(r0);
    t.rho_p = BoundaryCurve(
        [omega, a = fillet](double th) {
            double s = 1.0 - 2.0 * th / omega;
            return 2.0 * a - a * std::sqrt(std::max(0.0, 1.0 - s * s));
        },
        "rounded corner");
    t.family = Family::radial_graph;
    t.name = "rounded_corner";
    return t;
}

GeneratingTriple notched(double omega, double depth, double r0, double R0) {
    if (!(depth > 0.0)) throw ValidationError("notch depth must be positive");
    GeneratingTriple t;
    t.omega = omega;
    t.r0 = r0;
    t.R0 = R0;
    t.rho_omega = BoundaryCurve::constant(r0);
    t.rho_p = BoundaryCurve(
        [omega, depth](double th) {
            double bump = std::max(0.0, 1.0 - std::abs(th - 0.5 * omega) / (0.25 * omega));
            return depth * (1.0 + 0.5 * bump);
        },
        "notched");
    t.family = Family::radial_graph;
    t.name = "notched";
    return t;
}

}  // namespace corner::geometry
