#pragma once

#include <Eigen/Dense>
#include <vector>

#include "corner/engine/expansion.hpp"
#include "corner/geometry/rhs.hpp"
#include "corner/solver/problems.hpp"

namespace corner::engine {

struct FixedPointOptions {
    int J = 1;
    int max_iterations = 200;
    double tolerance = 1e-12;
    // Consecutive non-decreasing updates before giving up.
    int divergence_window = 5;
};

struct FixedPointResult {
    solver::FieldPtr u;  // on Omega
    solver::FieldPtr U;  // on P
    Eigen::VectorXd c;   // c_j(u)
    Eigen::VectorXd B;   // B_j(U)
    int iterations = 0;
    bool converged = false;
    // Median ratio of successive trace updates above round-off.
    double contraction_ratio = 0.0;
    std::vector<double> updates;
};

// Gauss-Seidel sweeps u <- solve_Omega(f - sum_j eps^{-lambda_j^-} B_j(U) [Delta, phi] h_j^-),
// U <- solve_P(F - sum_j eps^{lambda_j^+} c_j(u) [Delta, Phi] h_j^+).
// Throws ContractionFailure when the updates stop shrinking.
FixedPointResult coupled_fixed_point(const solver::Problem &p, double eps, const geometry::RhsSpec &rhs,
                                     const FixedPointOptions &opt);

// Phi(x/eps) u(x) + phi(x) U(x/eps).
std::vector<double> assemble_fixed_point(const solver::Problem &p, const FixedPointResult &fp, double eps,
                                         const std::vector<Point> &points);

}  // namespace corner::engine
