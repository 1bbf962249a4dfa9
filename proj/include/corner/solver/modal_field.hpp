#pragma once

#include <map>
#include <memory>

#include "corner/solver/field.hpp"
#include "corner/solver/radial.hpp"
#include "corner/spectral/basis.hpp"

namespace corner::solver {

// sum_j v_j(ln r) psi_j(theta) on a sector annulus t_a <= ln r <= t_b, with
// radiating ends continued analytically.
class ModalField : public Field {
public:
    ModalField(std::shared_ptr<const spectral::SpectralBasis> basis, std::map<int, RadialProfile> modes,
               DomainTag domain, ScaleFlag scale, double t_a, double t_b, bool extends_left, bool extends_right);

    double value(double r, double theta) const override;
    bool covers_radius(double rho) const override;
    std::vector<double> angular_nodes() const override;
    Eigen::VectorXd circle_values(double rho) const override;
    std::optional<double> projection(int j, double rho, const spectral::SpectralBasis &basis) const override;

    // Radial coefficient v_j(t); zero for modes without a profile.
    double mode_value(int j, double t) const;
    const std::map<int, RadialProfile> &profiles() const { return modes_; }
    double t_a() const { return t_a_; }
    double t_b() const { return t_b_; }

private:
    bool contains_t(double t) const;

    std::shared_ptr<const spectral::SpectralBasis> basis_;
    std::map<int, RadialProfile> modes_;
    double t_a_;
    double t_b_;
    bool extends_left_;
    bool extends_right_;
};

}  // namespace corner::solver
