#pragma once

#include <functional>
#include <vector>

namespace corner::solver {

// One additive piece of a radial source s(t), vanishing outside [lo, hi] and
// smooth between consecutive breakpoints.
struct SourcePiece {
    std::function<double(double)> fn;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> breakpoints;
};

enum class EndCondition { dirichlet, radiating };

// y'' - lambda^2 y = s on [t_a, t_b]. A radiating left end continues as
// C e^{lambda t} below t_a, a radiating right end as C e^{-lambda t} above t_b.
struct RadialProblem {
    double lambda = 1.0;
    double t_a = 0.0;
    double t_b = 1.0;
    EndCondition left = EndCondition::dirichlet;
    EndCondition right = EndCondition::dirichlet;
    double left_value = 0.0;
    double right_value = 0.0;
    std::vector<SourcePiece> sources;
    double max_cell = 0.02;
};

// Nodal solution of the exponentially fitted three-point scheme, which is
// exact for this constant-coefficient operator up to the source quadrature.
// Evaluation between nodes uses the cell Green's function, so the profile is
// accurate everywhere, not only at nodes.
class RadialProfile {
public:
    RadialProfile() = default;

    double operator()(double t) const;
    double t_a() const { return nodes_.front(); }
    double t_b() const { return nodes_.back(); }
    double lambda() const { return lambda_; }
    bool is_zero() const { return zero_; }
    bool extends_left() const { return left_ == EndCondition::radiating; }
    bool extends_right() const { return right_ == EndCondition::radiating; }
    const std::vector<double> &nodes() const { return nodes_; }
    const std::vector<double> &values() const { return values_; }

    friend RadialProfile solve_radial(const RadialProblem &p);

private:
    double source(double t) const;

    double lambda_ = 1.0;
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<char> cell_source_;
    std::vector<SourcePiece> sources_;
    EndCondition left_ = EndCondition::dirichlet;
    EndCondition right_ = EndCondition::dirichlet;
    bool zero_ = false;
};

RadialProfile solve_radial(const RadialProblem &p);

// sinh(x)/sinh(y) for 0 <= x <= y, stable for large arguments.
double sinh_ratio(double x, double y);

}  // namespace corner::solver
