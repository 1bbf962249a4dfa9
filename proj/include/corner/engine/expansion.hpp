#pragma once

#include <memory>
#include <vector>

#include "corner/engine/tables.hpp"
#include "corner/geometry/rhs.hpp"
#include "corner/solver/problems.hpp"

namespace corner::engine {

// K_j^- = phi h_j^- - Y_j^- on Omega (sign minus) or K_j^+ = Phi h_j^+ - Y_j^+ on P (sign plus).
class CanonicalProfile : public solver::Field {
public:
    CanonicalProfile(solver::FieldPtr Y, int j, spectral::Sign sign, geometry::Cutoffs cutoffs,
                     std::shared_ptr<const spectral::SpectralBasis> basis);

    double value(double r, double theta) const override;
    bool covers_radius(double rho) const override { return Y_->covers_radius(rho); }
    std::vector<double> angular_nodes() const override { return Y_->angular_nodes(); }

private:
    solver::FieldPtr Y_;
    int j_;
    spectral::Sign sign_;
    geometry::Cutoffs cutoffs_;
    std::shared_ptr<const spectral::SpectralBasis> basis_;
};

// Everything the evaluations need: limit solutions, correctors and coefficient tables.
struct Expansion {
    std::shared_ptr<const solver::Problem> problem;
    solver::LimitSolution u0;
    solver::LimitSolution U0;
    solver::Correctors Y;
    CoefficientTables tables;

    int J() const { return tables.J(); }
};

Expansion build_expansion(std::shared_ptr<const solver::Problem> problem, const geometry::RhsSpec &rhs,
                          const gps::Exponent &e_max, int J);

struct Point {
    double r = 0.0;
    double theta = 0.0;
};

struct EvalResult {
    std::vector<double> values;
    // Per point: sum of |term| over table exponents above e_max - 2 lambda_1^+.
    std::vector<double> indicator;
    std::size_t terms = 0;

    double max_indicator() const;
};

// u0(x) + sum_j sum_e eps^{e - lambda_j^-} B_{e;j} K_j^-(x) for r > 2 R0 eps.
EvalResult outer_eval(const Expansion &x, double eps, const std::vector<Point> &points);
// U0(x/eps) + sum_j sum_e eps^{e + lambda_j^+} c_{e;j} K_j^+(x/eps) for r < r0/2.
EvalResult inner_eval(const Expansion &x, double eps, const std::vector<Point> &points);
// Phi(x/eps) sum_e eps^e u_e(x) + phi(x) sum_e eps^e U_e(x/eps) anywhere in Omega_eps.
EvalResult global_eval(const Expansion &x, double eps, const std::vector<Point> &points);

// u_e = -sum_j (Pi^- B)_{e;j} Y_j^- (e > 0) and u_0, solved afresh from the combined corrector source.
solver::FieldPtr reconstruct_slow(const Expansion &x, std::size_t level);
// U_e = -sum_j (Pi^+ c)_{e;j} Y_j^+ (e > 0) and U_0.
solver::FieldPtr reconstruct_rapid(const Expansion &x, std::size_t level);

struct ConsistencyReport {
    // Per monoid level: max_k |c_k(u_e) - c_{e;k}| and max_k |B_k(U_e) - B_{e;k}|.
    std::vector<double> c_deviation;
    std::vector<double> B_deviation;
    double max_c = 0.0;
    double max_B = 0.0;
};

ConsistencyReport posthoc_consistency(const Expansion &x);

}  // namespace corner::engine
