#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "corner/geometry/triple.hpp"
#include "corner/solver/field.hpp"

namespace corner::solver {

enum class SideKind { curve, radiating };

// One radial end of a log-polar domain: either a boundary r = scale*curve(theta)
// or an artificial circle t = t_trunc carrying a modal DtN condition.
struct RadialSide {
    SideKind kind = SideKind::radiating;
    geometry::BoundaryCurve curve;
    double scale = 1.0;
    double t_trunc = 0.0;

    static RadialSide on_curve(geometry::BoundaryCurve c, double scale = 1.0);
    static RadialSide open(double t_trunc);
    double t_at(double theta) const;
};

struct LogPolarDomain {
    double omega = 0.0;
    RadialSide inner;
    RadialSide outer;
    // Dirichlet data on curved sides and edge rays; zero when empty.
    std::function<double(double, double)> boundary_data;

    // Signed distance in t to the nearest curved side (positive inside); +inf without curved sides.
    double margin(double t, double theta) const;
    bool separable() const;
    double data(double t, double theta) const { return boundary_data ? boundary_data(t, theta) : 0.0; }
};

enum class NodeKind : std::uint8_t { interior, dirichlet_zero, dtn_plus, dtn_minus, outside };

// Uniform (t, theta) tensor grid with t-nodes at anchor + k*h_t.
class LogPolarGrid {
public:
    LogPolarGrid(LogPolarDomain domain, double h_t, int n_theta, double anchor = 0.0);

    int nt() const { return nt_; }  // number of t intervals
    int n_theta() const { return n_theta_; }
    double t_min() const { return t_min_; }
    double t_max() const { return t_min_ + nt_ * h_t_; }
    double h_t() const { return h_t_; }
    double h_theta() const { return omega_ / n_theta_; }
    double omega() const { return omega_; }
    double t(int k) const { return t_min_ + k * h_t_; }
    double theta(int i) const { return omega_ * i / n_theta_; }
    NodeKind kind(int k, int i) const { return kinds_[static_cast<std::size_t>(k) * (n_theta_ + 1) + i]; }
    int unknown(int k, int i) const { return ids_[static_cast<std::size_t>(k) * (n_theta_ + 1) + i]; }
    int n_unknowns() const { return n_unknowns_; }
    bool has_dtn_plus() const { return inner_open_; }
    bool has_dtn_minus() const { return outer_open_; }
    const LogPolarDomain &domain() const { return domain_; }

    // Grid of the Kelvin image x -> rho^2 x / |x|^2, i.e. t -> 2 ln rho - t.
    LogPolarGrid reflected(double rho) const;

private:
    LogPolarGrid() = default;
    void number_unknowns();

    LogPolarDomain domain_;
    double omega_ = 0.0;
    double t_min_ = 0.0;
    double h_t_ = 0.0;
    int nt_ = 0;
    int n_theta_ = 0;
    bool inner_open_ = false;
    bool outer_open_ = false;
    int n_unknowns_ = 0;
    std::vector<NodeKind> kinds_;
    std::vector<int> ids_;
};

using GridPtr = std::shared_ptr<const LogPolarGrid>;

// Samples on a LogPolarGrid; values(k, i) at (t_k, theta_i).
class GridField : public Field {
public:
    GridField(GridPtr grid, Eigen::MatrixXd values, DomainTag domain, ScaleFlag scale);

    double value(double r, double theta) const override;
    bool covers_radius(double rho) const override;
    std::vector<double> angular_nodes() const override;
    Eigen::VectorXd circle_values(double rho) const override;

    const LogPolarGrid &grid() const { return *grid_; }
    const GridPtr &grid_ptr() const { return grid_; }
    const Eigen::MatrixXd &values() const { return values_; }

    // Kelvin image: v(t, theta) = u(2 ln rho - t, theta), domain and scale tags swapped.
    GridField reflected(double rho) const;

    // "t,theta,value" rows for all non-outside nodes.
    void write_csv(std::ostream &out) const;
    // Layout (little endian): "LPGF", u32 version = 1, u32 domain, u32 scale, u32 rows,
    // u32 cols, f64 t_min, f64 h_t, f64 omega, rows*cols f64 values (row-major,
    // row = t index), rows*cols u8 node kinds.
    void write_binary(std::ostream &out) const;

private:
    double continuation(bool bottom, double t, double theta) const;
    double column_value(int i, double t) const;

    GridPtr grid_;
    Eigen::MatrixXd values_;
    Eigen::VectorXd bottom_coeffs_;
    Eigen::VectorXd top_coeffs_;
};

// Samples fn(r, theta) at the non-outside nodes of the grid.
GridField sample_field(GridPtr grid, const std::function<double(double, double)> &fn, DomainTag domain, ScaleFlag scale);

struct BinaryGrid {
    DomainTag domain = DomainTag::omega;
    ScaleFlag scale = ScaleFlag::slow;
    double t_min = 0.0;
    double h_t = 0.0;
    double omega = 0.0;
    Eigen::MatrixXd values;
    std::vector<NodeKind> kinds;
};
BinaryGrid read_binary_grid(std::istream &in);

struct SolveReport {
    Eigen::MatrixXd values;
    double residual = 0.0;  // normwise backward error of the final iterate
    int refinements = 0;
};

// Five-point Laplacian in (t, theta) with Shortley-Weller distances at curved
// boundaries and discrete modal DtN rows at artificial circles; factorized once.
class FdSolver {
public:
    explicit FdSolver(GridPtr grid, double residual_tol = 1e-12);

    // Solves u_tt + u_thth = source(t, theta) with the domain's Dirichlet data.
    SolveReport solve(const std::function<double(double, double)> &source) const;
    const GridPtr &grid() const { return grid_; }

private:
    GridPtr grid_;
    double tol_;
    Eigen::SparseMatrix<double> A_;
    Eigen::VectorXd bc_;  // boundary-data contributions moved to the rhs
    double a_norm_ = 0.0;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

// Discrete DtN transfer T (size n_theta - 1): the ghost row beyond an artificial
// circle equals T times the boundary row for the decaying discrete harmonic extension.
Eigen::MatrixXd dtn_transfer(int n_theta, double h_t, double h_theta);

GridField assemble_and_solve(GridPtr grid, const std::function<double(double, double)> &source, DomainTag domain,
                             ScaleFlag scale, double residual_tol = 1e-12);

}  // namespace corner::solver
