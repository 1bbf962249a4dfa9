#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "corner/geometry/cutoff.hpp"
#include "corner/geometry/rhs.hpp"
#include "corner/geometry/triple.hpp"
#include "corner/solver/field.hpp"
#include "corner/solver/grid.hpp"
#include "corner/solver/source.hpp"
#include "corner/spectral/basis.hpp"
#include "corner/spectral/trace.hpp"

namespace corner::solver {

struct SolverConfig {
    // Finite-difference grid: t step and angular intervals.
    double h_t = 0.025;
    int n_theta = 96;
    // Largest cell of the per-mode radial solver inside source supports.
    double modal_max_cell = 0.02;
    // Use the 2D finite-difference solver even for separable problems.
    bool force_fd = false;
    // Compute interaction matrices from correctors even for annular_exact triples.
    bool numeric_matrices = false;
    double residual_tol = 1e-12;
    int threads = 1;
};

// Geometry, eigendata, cutoffs and solver settings shared by all solves of one run.
class Problem {
public:
    Problem(geometry::GeneratingTriple triple, std::shared_ptr<const spectral::SpectralBasis> basis,
            geometry::Cutoffs cutoffs, SolverConfig config);

    const geometry::GeneratingTriple &triple() const { return triple_; }
    const spectral::SpectralBasis &basis() const { return *basis_; }
    const std::shared_ptr<const spectral::SpectralBasis> &basis_ptr() const { return basis_; }
    const geometry::Cutoffs &cutoffs() const { return cutoffs_; }
    const SolverConfig &config() const { return config_; }

    // Trace radii: one transition width inside the cutoff plateaus.
    std::vector<double> omega_extraction_radii() const;
    std::vector<double> pattern_extraction_radii() const;

    LogPolarDomain omega_domain() const;
    LogPolarDomain pattern_domain() const;
    LogPolarDomain omega_eps_domain(double eps) const;

    Source source_f(const geometry::RhsSpec &rhs) const;
    Source source_F(const geometry::RhsSpec &rhs) const;
    Source source_eps(const geometry::RhsSpec &rhs, double eps) const;
    // Flat source of Y_j^+ on P (sign plus) or Y_j^- on Omega (sign minus).
    Source corrector_source(int j, spectral::Sign sign) const;

    FieldPtr solve(DomainTag domain, const Source &source, double eps = 0.0) const;

private:
    bool separable(DomainTag domain) const;
    FieldPtr solve_modal(DomainTag domain, const Source &source, double eps) const;
    FieldPtr solve_fd(DomainTag domain, const Source &source, double eps) const;
    std::shared_ptr<const FdSolver> fd_solver(DomainTag domain, double eps) const;

    geometry::GeneratingTriple triple_;
    std::shared_ptr<const spectral::SpectralBasis> basis_;
    geometry::Cutoffs cutoffs_;
    SolverConfig config_;
    mutable std::mutex cache_mutex_;
    mutable std::map<int, std::shared_ptr<const FdSolver>> fd_cache_;
};

struct LimitSolution {
    FieldPtr field;
    spectral::ModalTrace trace;
};

LimitSolution solve_limit_omega(const Problem &p, const geometry::RhsSpec &rhs);
LimitSolution solve_limit_pattern(const Problem &p, const geometry::RhsSpec &rhs);

FieldPtr compute_corrector(const Problem &p, int j, spectral::Sign sign);

struct InteractionMatrices {
    Eigen::MatrixXd S_Omega;  // (k, j) = c_k(Y_j^-)
    Eigen::MatrixXd S_P;      // (k, j) = B_k(Y_j^+)
    bool analytic = false;
    double max_deviation_Omega = 0.0;
    double max_deviation_P = 0.0;
};

struct Correctors {
    std::vector<FieldPtr> plus;   // Y_j^+ on P, j = 1..J
    std::vector<FieldPtr> minus;  // Y_j^- on Omega
};

Correctors compute_correctors(const Problem &p, int J);
InteractionMatrices interaction_matrices(const Problem &p, const Correctors &Y);
// Analytic for annular_exact triples unless config.numeric_matrices, otherwise from fresh correctors.
InteractionMatrices interaction_matrices(const Problem &p, int J);

FieldPtr direct_oracle(const Problem &p, double eps, const geometry::RhsSpec &rhs);

// u'' + u'/r - lambda^2 u / r^2 = s(r) on (r_a, r_b), u = 0 at finite ends and
// bounded (r_a = 0) or decaying (r_b = inf) otherwise.
struct RadialSourceTerm {
    std::function<double(double)> fn;
    double lo = 0.0;
    double hi = 0.0;
};

struct ExactModeProblem {
    double lambda = 1.0;
    double r_a = 0.0;
    double r_b = 1.0;
    std::vector<RadialSourceTerm> sources;
};

struct ExactModeSolution {
    double lambda = 1.0;
    double r_a = 0.0;
    double r_b = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<RadialSourceTerm> sources;
    // Per source: panel edges and cumulative integrals of r^{1-lambda} s and r^{1+lambda} s.
    struct Panels {
        std::vector<double> edges, I1, I2;
    };
    std::vector<Panels> panels;
    std::vector<std::pair<double, double>> table;  // (r, u)
    // Source-free subintervals (lo, hi) with u = A r^lambda + B r^-lambda there.
    struct Homogeneous {
        double lo, hi, A, B;
    };
    std::vector<Homogeneous> homogeneous;

    double operator()(double r) const;
    // Coefficients of r^lambda and r^-lambda in u at r (valid pointwise).
    std::pair<double, double> coefficients(double r) const;
};

ExactModeSolution solve_exact_mode(const ExactModeProblem &p, int table_size = 1001);

// Mode j of Omega_eps for an annular_exact triple with data amplitude_f*g(r)psi_j and
// amplitude_F*G(R)psi_j; eps = 0 gives the Omega limit problem.
ExactModeSolution exact_mode_oracle(const geometry::GeneratingTriple &t, double eps, int j,
                                    const spectral::SpectralBasis &basis, const geometry::RhsComponent &f,
                                    const geometry::RhsComponent &F);

}  // namespace corner::solver
