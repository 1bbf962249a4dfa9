#include "corner/solver/modal_field.hpp"

#include <cmath>

#include "corner/error.hpp"

namespace corner::solver {

ModalField::ModalField(std::shared_ptr<const spectral::SpectralBasis> basis, std::map<int, RadialProfile> modes,
                       DomainTag domain, ScaleFlag scale, double t_a, double t_b, bool extends_left,
                       bool extends_right)
    : Field(basis->omega(), domain, scale),
      basis_(std::move(basis)),
      modes_(std::move(modes)),
      t_a_(t_a),
      t_b_(t_b),
      extends_left_(extends_left),
      extends_right_(extends_right) {}

bool ModalField::contains_t(double t) const {
    const double slack = 1e-12 * (1.0 + std::abs(t_a_) + std::abs(t_b_));
    if (t < t_a_ - slack && !extends_left_) return false;
    if (t > t_b_ + slack && !extends_right_) return false;
    return true;
}

double ModalField::mode_value(int j, double t) const {
    auto it = modes_.find(j);
    if (it == modes_.end()) return 0.0;
    return it->second(t);
}

double ModalField::value(double r, double theta) const {
    if (!(r > 0.0)) throw OutOfDomain("field evaluated at r <= 0");
    const double t = std::log(r);
    if (!contains_t(t)) throw OutOfDomain("point outside the modal field region");
    double s = 0.0;
    for (const auto &[j, prof] : modes_) {
        if (prof.is_zero()) continue;
        s += prof(t) * basis_->psi(j, theta);
    }
    return s;
}

bool ModalField::covers_radius(double rho) const { return rho > 0.0 && contains_t(std::log(rho)); }

std::vector<double> ModalField::angular_nodes() const {
    const auto &n = basis_->nodes();
    return std::vector<double>(n.data(), n.data() + n.size());
}

std::optional<double> ModalField::projection(int j, double rho, const spectral::SpectralBasis &basis) const {
    if (&basis != basis_.get() || !covers_radius(rho)) return std::nullopt;
    return mode_value(j, std::log(rho));
}

Eigen::VectorXd ModalField::circle_values(double rho) const {
    if (!covers_radius(rho)) throw OutOfDomain("circle outside the modal field region");
    const double t = std::log(rho);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(basis_->nodes().size());
    for (const auto &[j, prof] : modes_) {
        if (prof.is_zero()) continue;
        v += prof(t) * basis_->samples().col(j - 1);
    }
    return v;
}

}  // namespace corner::solver
