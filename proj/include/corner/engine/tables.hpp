#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "corner/gps/monoid.hpp"
#include "corner/gps/series.hpp"
#include "corner/solver/problems.hpp"
#include "corner/spectral/basis.hpp"

namespace corner::engine {

enum class Side { inner, outer };

// c[i], B[i] are the coefficient vectors at monoid element i.
struct CoefficientTables {
    gps::ExponentMonoid monoid;
    std::vector<Eigen::VectorXd> c;
    std::vector<Eigen::VectorXd> B;
    solver::InteractionMatrices matrices;
    std::shared_ptr<const spectral::SpectralBasis> basis;

    int J() const { return static_cast<int>(matrices.S_P.cols()); }
    const gps::Exponent &e_max() const { return monoid.e_max(); }
};

// Monoid generated by lambda_j^+ and -lambda_j^- for j <= J.
gps::ExponentMonoid expansion_monoid(const spectral::SpectralBasis &basis, int J, const gps::Exponent &e_max,
                                     double tol = gps::kDefaultDedupTolerance);

// Smallest J with lambda_J^+ > e_max - lambda_1^+.
int required_modes(const spectral::SpectralBasis &basis, double e_max);

// plus: (c_{e - lambda_j^+; j})_j; minus: (B_{e + lambda_j^-; j})_j; zero where the shifted exponent is not in the monoid.
Eigen::VectorXd pi_shift(const CoefficientTables &t, spectral::Sign sign, const gps::Exponent &e);

CoefficientTables recursive_coefficients(const Eigen::VectorXd &c0, const Eigen::VectorXd &B0,
                                         const solver::InteractionMatrices &matrices, const gps::ExponentMonoid &monoid,
                                         std::shared_ptr<const spectral::SpectralBasis> basis);

// inner: sum_e c_{e;j} X^{e + lambda_j^+}; outer: sum_e B_{e;j} X^{e - lambda_j^-}.
gps::GenSeries<double> mode_series(const CoefficientTables &t, int j, Side side);

// "e,j,c,B" rows for every nonzero entry, ascending in e then j.
void write_tables_csv(std::ostream &os, const CoefficientTables &t);
std::size_t nonzero_entries(const CoefficientTables &t);

// Largest eps on a bisection grid with
// sum_j (|S_P(:,j)|_inf eps^{lambda_j^+} + |S_Omega(:,j)|_inf eps^{-lambda_j^-}) < 1.
double estimate_epsilon_star(const solver::InteractionMatrices &m, const spectral::SpectralBasis &basis);

}  // namespace corner::engine
