#include "corner/spectral/trace.hpp"

#include <cmath>
#include <ostream>

#include "corner/error.hpp"

namespace corner::spectral {

ModalTrace trace_coefficients(const solver::Field &field, double rho, Sign sign, const SpectralBasis &basis) {
    if (!(rho > 0.0) || !field.covers_radius(rho))
        throw OutOfDomain("trace radius " + std::to_string(rho) + " is outside the field region");
    const auto nodes = field.angular_nodes();
    const Eigen::VectorXd u = field.circle_values(rho);
    const auto n = static_cast<Eigen::Index>(nodes.size()) - 1;
    const double h = field.omega() / static_cast<double>(n);
    ModalTrace t;
    t.rho = rho;
    t.sign = sign;
    t.radii = {rho};
    t.coefficients = Eigen::VectorXd::Zero(basis.J());
    for (int j = 1; j <= basis.J(); ++j) {
        double s = 0.0;
        if (auto exact = field.projection(j, rho, basis)) {
            s = *exact;
        } else {
            for (Eigen::Index i = 1; i < n; ++i) s += u[i] * basis.psi(j, nodes[static_cast<std::size_t>(i)]);
            s *= h;
        }
        t.coefficients[j - 1] = std::pow(rho, -basis.lambda(j, sign)) * s;
    }
    return t;
}

ModalTrace averaged_trace(const solver::Field &field, const std::vector<double> &radii, Sign sign,
                          const SpectralBasis &basis) {
    if (radii.empty()) throw PreconditionError("averaged_trace needs at least one radius");
    std::vector<Eigen::VectorXd> all;
    for (double r : radii) all.push_back(trace_coefficients(field, r, sign, basis).coefficients);
    ModalTrace t;
    t.rho = radii.front();
    t.sign = sign;
    t.radii = radii;
    t.coefficients = Eigen::VectorXd::Zero(basis.J());
    for (const auto &c : all) t.coefficients += c;
    t.coefficients /= static_cast<double>(all.size());
    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b)
            t.max_deviation = std::max(t.max_deviation, (all[a] - all[b]).cwiseAbs().maxCoeff());
    return t;
}

void write_trace_csv(std::ostream &os, const ModalTrace &trace) {
    os << "j,value\n";
    for (Eigen::Index j = 0; j < trace.coefficients.size(); ++j)
        os << (j + 1) << ',' << gps::format_double(trace.coefficients[j]) << '\n';
}

}  // namespace corner::spectral
