#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corner/gps/exponent.hpp"

namespace corner::spectral {

enum class Sign { plus, minus };

struct Mode {
    double mu = 0.0;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
};

// Cone-section eigendata: modes j = 1..J with angular samples psi_j on a
// node set carrying quadrature weights.
class SpectralBasis {
public:
    SpectralBasis() = default;

    int n() const { return n_; }
    bool is_sector() const { return omega_.has_value(); }
    double omega() const;
    // omega / pi as an exact fraction when known.
    const std::optional<gps::Rational> &omega_over_pi() const { return omega_over_pi_; }
    int J() const { return static_cast<int>(modes_.size()); }
    const Mode &mode(int j) const;  // 1-based
    const std::vector<Mode> &modes() const { return modes_; }

    const Eigen::VectorXd &nodes() const { return nodes_; }
    const Eigen::VectorXd &weights() const { return weights_; }
    // samples(i, j - 1) = psi_j(nodes[i]).
    const Eigen::MatrixXd &samples() const { return psi_; }

    // psi_j(theta); closed form for built-in sectors, local cubic interpolation otherwise.
    double psi(int j, double theta) const;

    gps::Exponent lambda_plus_exponent(int j) const;
    gps::Exponent minus_lambda_minus_exponent(int j) const;
    double lambda(int j, Sign s) const { return s == Sign::plus ? mode(j).lambda_plus : mode(j).lambda_minus; }

    friend SpectralBasis sector_eigendata(double omega, int J, int n_theta);
    friend SpectralBasis sector_eigendata_exact(const gps::Rational &omega_over_pi, int J, int n_theta);
    friend SpectralBasis external_eigendata(int n, const std::vector<double> &mu, const Eigen::VectorXd &nodes,
                                            const Eigen::VectorXd &weights, const Eigen::MatrixXd &psi,
                                            std::optional<double> omega, double *renormalized_by);

private:
    int n_ = 2;
    std::optional<double> omega_;
    std::optional<gps::Rational> omega_over_pi_;
    bool analytic_ = false;
    std::vector<Mode> modes_;
    Eigen::VectorXd nodes_;
    Eigen::VectorXd weights_;
    Eigen::MatrixXd psi_;
};

// Dirichlet sine modes of the plane sector (0, omega).
SpectralBasis sector_eigendata(double omega, int J, int n_theta);
SpectralBasis sector_eigendata_exact(const gps::Rational &omega_over_pi, int J, int n_theta);

// Orthonormality is re-checked: Gram deviations below 1e-6 are corrected by
// symmetric orthonormalization (reported through renormalized_by), larger
// ones are rejected with ValidationError.
SpectralBasis external_eigendata(int n, const std::vector<double> &mu, const Eigen::VectorXd &nodes,
                                 const Eigen::VectorXd &weights, const Eigen::MatrixXd &psi,
                                 std::optional<double> omega = std::nullopt, double *renormalized_by = nullptr);

// Eigendata files: "j,mu" rows and "node,weight,psi_1,...,psi_J" rows.
SpectralBasis read_eigendata_csv(int n, const std::string &mu_path, const std::string &psi_path,
                                 std::optional<double> omega = std::nullopt);
void write_eigendata_csv(const SpectralBasis &basis, std::ostream &mu_out, std::ostream &psi_out);

std::pair<double, double> lambda_pm(int n, double mu);

// {lambda_j^+} union {-lambda_j^-}, sorted and deduplicated.
std::vector<gps::Exponent> exponent_set(const SpectralBasis &basis, double tol = gps::kDefaultDedupTolerance);

double h_eval(const SpectralBasis &basis, int j, Sign sign, double r, double theta);

int counting_function(const SpectralBasis &basis, double lam);
// #{j : -lambda_j^- <= lam}.
int counting_function_minus(const SpectralBasis &basis, double lam);
// d = 2 / lambda_1^+ + 1.
double counting_constant(const SpectralBasis &basis);

}  // namespace corner::spectral
