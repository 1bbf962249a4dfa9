#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "corner/solver/field.hpp"
#include "corner/spectral/basis.hpp"

namespace corner::spectral {

// c_j = rho^{-lambda_j^+} int u psi_j (sign plus) or B_j = rho^{-lambda_j^-} int U psi_j (sign minus).
struct ModalTrace {
    double rho = 0.0;
    Eigen::VectorXd coefficients;
    Sign sign = Sign::plus;
    // Largest pairwise difference between the radii that were averaged.
    double max_deviation = 0.0;
    std::vector<double> radii;
};

ModalTrace trace_coefficients(const solver::Field &field, double rho, Sign sign, const SpectralBasis &basis);

// Mean of the traces at several radii; rho is reported as the first radius.
ModalTrace averaged_trace(const solver::Field &field, const std::vector<double> &radii, Sign sign,
                          const SpectralBasis &basis);

void write_trace_csv(std::ostream &os, const ModalTrace &trace);

}  // namespace corner::spectral
