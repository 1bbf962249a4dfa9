#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "corner/gps/exponent.hpp"

namespace corner::geometry {

enum class Family { annular_exact, radial_graph };

std::string to_string(Family f);

// theta -> radius on [0, omega].
class BoundaryCurve {
public:
    BoundaryCurve() = default;
    static BoundaryCurve constant(double radius);
    BoundaryCurve(std::function<double(double)> rho, std::string description);

    double operator()(double theta) const { return constant_ ? *constant_ : rho_(theta); }
    const std::optional<double> &constant_value() const { return constant_; }
    bool is_constant() const { return constant_.has_value(); }
    const std::string &description() const { return description_; }
    // Min and max over a dense sampling of [0, omega].
    std::pair<double, double> range(double omega, int samples = 4096) const;

private:
    std::function<double(double)> rho_;
    std::optional<double> constant_;
    std::string description_;
};

// Monotone (Fritsch-Carlson) cubic through sampled (theta, r) pairs.
BoundaryCurve sampled_curve(std::vector<double> theta, std::vector<double> r);

struct GeneratingTriple {
    double omega = 0.0;
    std::optional<gps::Rational> omega_over_pi;
    double r0 = 1.0;
    double R0 = 1.0;
    BoundaryCurve rho_omega;
    BoundaryCurve rho_p;
    Family family = Family::annular_exact;
    std::string name;

    double eps0() const { return r0 / R0; }
    double eps_max() const { return 0.25 * eps0(); }
};

struct TripleReport {
    double eps0 = 0.0;
    // Working range is (0, eps_max].
    double eps_max = 0.0;
    std::vector<std::string> notes;
};

// Throws ValidationError with a descriptive message on the first violated condition.
TripleReport validate_triple(const GeneratingTriple &t);

bool omega_eps_contains(const GeneratingTriple &t, double eps, double r, double theta);

GeneratingTriple annulus(double omega, double r0, double R0);
GeneratingTriple annulus_exact(const gps::Rational &omega_over_pi, double r0, double R0);

// Polar-elliptic rounding of the vertex: rho_P = 2a - a*sqrt(1 - (1 - 2 theta/omega)^2),
// meeting both edges at radius 2a and reaching a on the bisector.
GeneratingTriple rounded_corner(double omega, double fillet, double r0 = 1.0, double R0 = 1.0);

// rho_P = depth*(1 + 0.5*max(0, 1 - |theta - omega/2| / (omega/4))): a triangular notch around the bisector.
GeneratingTriple notched(double omega, double depth, double r0 = 1.0, double R0 = 1.0);

}  // namespace corner::geometry
