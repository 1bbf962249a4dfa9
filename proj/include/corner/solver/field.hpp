#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace corner::spectral {
class SpectralBasis;
}

namespace corner::solver {

enum class DomainTag { omega, pattern, omega_eps };
enum class ScaleFlag { slow, rapid };

std::string to_string(DomainTag d);

// A scalar function on a plane sector, addressed in polar coordinates.
class Field {
public:
    Field(double omega, DomainTag domain, ScaleFlag scale) : omega_(omega), domain_(domain), scale_(scale) {}
    virtual ~Field() = default;

    virtual double value(double r, double theta) const = 0;
    // True when the whole arc {r = rho, 0 < theta < omega} lies in the represented region.
    virtual bool covers_radius(double rho) const = 0;
    // Uniform angular nodes 0 = theta_0 < ... < theta_N = omega used for circle quadrature.
    virtual std::vector<double> angular_nodes() const = 0;

    // Samples at angular_nodes() on the circle of radius rho.
    virtual Eigen::VectorXd circle_values(double rho) const;
    // int_0^omega u(rho, theta) psi_j(theta) dtheta when the representation carries it
    // exactly in terms of this basis; nullopt otherwise.
    virtual std::optional<double> projection(int, double, const spectral::SpectralBasis &) const {
        return std::nullopt;
    }

    double omega() const { return omega_; }
    DomainTag domain() const { return domain_; }
    ScaleFlag scale() const { return scale_; }
    int dimension() const { return 2; }

private:
    double omega_;
    DomainTag domain_;
    ScaleFlag scale_;
};

using FieldPtr = std::shared_ptr<const Field>;

class ZeroField : public Field {
public:
    ZeroField(double omega, DomainTag domain, ScaleFlag scale, int n_theta = 64)
        : Field(omega, domain, scale), n_theta_(n_theta) {}
    double value(double, double) const override { return 0.0; }
    bool covers_radius(double rho) const override { return rho > 0.0; }
    std::vector<double> angular_nodes() const override;

private:
    int n_theta_;
};

// sum_i coefficients[i] * fields[i], all defined on a common region.
class LinearCombinationField : public Field {
public:
    LinearCombinationField(std::vector<FieldPtr> fields, std::vector<double> coefficients, DomainTag domain,
                           ScaleFlag scale);
    double value(double r, double theta) const override;
    bool covers_radius(double rho) const override;
    std::vector<double> angular_nodes() const override;
    Eigen::VectorXd circle_values(double rho) const override;
    std::optional<double> projection(int j, double rho, const spectral::SpectralBasis &basis) const override;

private:
    std::vector<FieldPtr> fields_;
    std::vector<double> coefficients_;
};

std::vector<double> uniform_angles(double omega, int n);

}  // namespace corner::solver
