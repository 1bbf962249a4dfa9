#include "corner/solver/field.hpp"

#include <algorithm>

#include "corner/error.hpp"

namespace corner::solver {

std::string to_string(DomainTag d) {
    switch (d) {
        case DomainTag::omega:
            return "Omega";
        case DomainTag::pattern:
            return "P";
        case DomainTag::omega_eps:
            return "Omega_eps";
    }
    return "?";
}

std::vector<double> uniform_angles(double omega, int n) {
    std::vector<double> th(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) th[static_cast<std::size_t>(i)] = omega * i / n;
    th.back() = omega;
    return th;
}

Eigen::VectorXd Field::circle_values(double rho) const {
    if (!covers_radius(rho)) throw OutOfDomain("circle of radius " + std::to_string(rho) + " leaves the field region");
    auto th = angular_nodes();
    Eigen::VectorXd v(static_cast<Eigen::Index>(th.size()));
    v.setZero();
    for (std::size_t i = 1; i + 1 < th.size(); ++i) v[static_cast<Eigen::Index>(i)] = value(rho, th[i]);
    return v;
}

std::vector<double> ZeroField::angular_nodes() const { return uniform_angles(omega(), n_theta_); }

LinearCombinationField::LinearCombinationField(std::vector<FieldPtr> fields, std::vector<double> coefficients,
                                               DomainTag domain, ScaleFlag scale)
    : Field(fields.empty() ? 0.0 : fields.front()->omega(), domain, scale),
      fields_(std::move(fields)),
      coefficients_(std::move(coefficients)) {
    if (fields_.empty() || fields_.size() != coefficients_.size())
        throw PreconditionError("linear combination needs matching, nonempty field and coefficient lists");
}

double LinearCombinationField::value(double r, double theta) const {
    double s = 0.0;
    for (std::size_t i = 0; i < fields_.size(); ++i)
        if (coefficients_[i] != 0.0) s += coefficients_[i] * fields_[i]->value(r, theta);
    return s;
}

bool LinearCombinationField::covers_radius(double rho) const {
    return std::all_of(fields_.begin(), fields_.end(), [&](const FieldPtr &f) { return f->covers_radius(rho); });
}

std::vector<double> LinearCombinationField::angular_nodes() const {
    std::vector<double> best = fields_.front()->angular_nodes();
    for (const auto &f : fields_) {
        auto a = f->angular_nodes();
        if (a.size() > best.size()) best = std::move(a);
    }
    return best;
}

Eigen::VectorXd LinearCombinationField::circle_values(double rho) const {
    auto nodes = angular_nodes();
    bool aligned = true;
    for (const auto &f : fields_)
        if (f->angular_nodes().size() != nodes.size()) aligned = false;
    if (!aligned) return Field::circle_values(rho);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < fields_.size(); ++i)
        if (coefficients_[i] != 0.0) v += coefficients_[i] * fields_[i]->circle_values(rho);
    return v;
}

std::optional<double> LinearCombinationField::projection(int j, double rho,
                                                         const spectral::SpectralBasis &basis) const {
    double s = 0.0;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (coefficients_[i] == 0.0) continue;
        auto p = fields_[i]->projection(j, rho, basis);
        if (!p) return std::nullopt;
        s += coefficients_[i] * *p;
    }
    return s;
}

}  // namespace corner::solver
