#include "corner/solver/radial.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "corner/error.hpp"

namespace corner::solver {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 10>;

// 1/sinh(x) and coth(x) for x > 0.
double csch(double x) { return 2.0 * std::exp(-x) / (-std::expm1(-2.0 * x)); }
double coth(double x) { return (2.0 + std::expm1(-2.0 * x)) / (-std::expm1(-2.0 * x)); }

// sinh(a) sinh(b) / sinh(c) for a, b >= 0 with a + b <= c.
double sinh_prod_ratio(double a, double b, double c) {
    return std::exp(a + b - c) * (-std::expm1(-2.0 * a)) * (-std::expm1(-2.0 * b)) / (2.0 * (-std::expm1(-2.0 * c)));
}

}  // namespace

double sinh_ratio(double x, double y) {
    if (x <= 0.0) return 0.0;
    return std::exp(x - y) * std::expm1(-2.0 * x) / std::expm1(-2.0 * y);
}

double RadialProfile::source(double t) const {
    double s = 0.0;
    for (const auto &p : sources_)
        if (t >= p.lo && t <= p.hi) s += p.fn(t);
    return s;
}

double RadialProfile::operator()(double t) const {
    if (nodes_.empty()) throw PreconditionError("radial profile is empty");
    const double ta = nodes_.front();
    const double tb = nodes_.back();
    const double slack = 1e-12 * (1.0 + std::abs(ta) + std::abs(tb));
    if (t < ta) {
        if (left_ == EndCondition::radiating) return values_.front() * std::exp(lambda_ * (t - ta));
        if (t < ta - slack) throw OutOfDomain("radial profile evaluated below its interval");
        return values_.front();
    }
    if (t > tb) {
        if (right_ == EndCondition::radiating) return values_.back() * std::exp(-lambda_ * (t - tb));
        if (t > tb + slack) throw OutOfDomain("radial profile evaluated above its interval");
        return values_.back();
    }
    if (zero_) return 0.0;
    std::size_t k = static_cast<std::size_t>(std::upper_bound(nodes_.begin(), nodes_.end(), t) - nodes_.begin());
    k = std::clamp<std::size_t>(k, 1, nodes_.size() - 1) - 1;
    const double t0 = nodes_[k];
    const double t1 = nodes_[k + 1];
    const double L = lambda_;
    const double c = L * (t1 - t0);
    double y = values_[k] * sinh_ratio(L * (t1 - t), c) + values_[k + 1] * sinh_ratio(L * (t - t0), c);
    if (cell_source_[k]) {
        const double left = Gauss::integrate(
            [&](double tau) { return sinh_prod_ratio(L * (tau - t0), L * (t1 - t), c) * source(tau); }, t0, t);
        const double right = Gauss::integrate(
            [&](double tau) { return sinh_prod_ratio(L * (t - t0), L * (t1 - tau), c) * source(tau); }, t, t1);
        y -= (left + right) / L;
    }
    return y;
}

RadialProfile solve_radial(const RadialProblem &p) {
    if (!(p.t_b > p.t_a)) throw PreconditionError("radial interval must have t_b > t_a");
    if (!(p.lambda > 0.0)) throw PreconditionError("radial exponent must be positive");
    RadialProfile prof;
    prof.lambda_ = p.lambda;
    prof.left_ = p.left;
    prof.right_ = p.right;
    for (const auto &s : p.sources)
        if (s.hi > p.t_a && s.lo < p.t_b) prof.sources_.push_back(s);

    std::vector<double> cuts = {p.t_a, p.t_b};
    for (const auto &s : prof.sources_) {
        for (double b : s.breakpoints) cuts.push_back(b);
        cuts.push_back(s.lo);
        cuts.push_back(s.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    const double merge = 1e-12 * (1.0 + std::abs(p.t_a) + std::abs(p.t_b));
    std::vector<double> pts;
    for (double c : cuts) {
        if (c < p.t_a || c > p.t_b) continue;
        if (pts.empty() || c - pts.back() > merge) pts.push_back(c);
    }
    if (pts.back() != p.t_b) pts.back() = p.t_b;

    auto active = [&](double a, double b) {
        for (const auto &s : prof.sources_)
            if (s.hi > a && s.lo < b) return true;
        return false;
    };
    prof.nodes_.push_back(pts.front());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i];
        const double b = pts[i + 1];
        const bool act = active(a, b);
        const int n = act ? std::max(1, static_cast<int>(std::ceil((b - a) / p.max_cell))) : 1;
        for (int m = 1; m <= n; ++m) {
            prof.nodes_.push_back(m == n ? b : a + (b - a) * m / n);
            prof.cell_source_.push_back(act ? 1 : 0);
        }
    }

    const std::size_t N = prof.nodes_.size() - 1;
    const double L = p.lambda;
    if (prof.sources_.empty() && p.left_value == 0.0 && p.right_value == 0.0) {
        prof.zero_ = true;
        prof.values_.assign(N + 1, 0.0);
        return prof;
    }

    // Load integrals of the hat-like test functions against the source.
    std::vector<double> load_left(N + 1, 0.0);   // int over cell k-1 of phi_L^{(k)} s
    std::vector<double> load_right(N + 1, 0.0);  // int over cell k of phi_R^{(k)} s
    for (std::size_t k = 0; k < N; ++k) {
        if (!prof.cell_source_[k]) continue;
        const double t0 = prof.nodes_[k];
        const double t1 = prof.nodes_[k + 1];
        const double c = L * (t1 - t0);
        load_right[k] = Gauss::integrate([&](double t) { return sinh_ratio(L * (t1 - t), c) * prof.source(t); }, t0, t1);
        load_left[k + 1] = Gauss::integrate([&](double t) { return sinh_ratio(L * (t - t0), c) * prof.source(t); }, t0, t1);
    }

    std::vector<double> lo(N + 1, 0.0), di(N + 1, 0.0), up(N + 1, 0.0), rhs(N + 1, 0.0);
    for (std::size_t k = 0; k <= N; ++k) {
        const bool first = k == 0;
        const bool last = k == N;
        if (first && p.left == EndCondition::dirichlet) {
            di[k] = 1.0;
            rhs[k] = p.left_value;
            continue;
        }
        if (last && p.right == EndCondition::dirichlet) {
            di[k] = 1.0;
            rhs[k] = p.right_value;
            continue;
        }
        if (first) {
            const double c = L * (prof.nodes_[1] - prof.nodes_[0]);
            up[k] = L * csch(c);
            di[k] = -L * (1.0 + coth(c));
            rhs[k] = load_right[k];
            continue;
        }
        if (last) {
            const double c = L * (prof.nodes_[N] - prof.nodes_[N - 1]);
            lo[k] = L * csch(c);
            di[k] = -L * (1.0 + coth(c));
            rhs[k] = load_left[k];
            continue;
        }
        const double c1 = L * (prof.nodes_[k] - prof.nodes_[k - 1]);
        const double c2 = L * (prof.nodes_[k + 1] - prof.nodes_[k]);
        lo[k] = L * csch(c1);
        up[k] = L * csch(c2);
        di[k] = -L * (coth(c1) + coth(c2));
        rhs[k] = load_left[k] + load_right[k];
    }

    // Thomas algorithm; the system is strictly diagonally dominant.
    std::vector<double> cp(N + 1, 0.0), dp(N + 1, 0.0);
    cp[0] = up[0] / di[0];
    dp[0] = rhs[0] / di[0];
    for (std::size_t k = 1; k <= N; ++k) {
        const double m = di[k] - lo[k] * cp[k - 1];
        cp[k] = up[k] / m;
        dp[k] = (rhs[k] - lo[k] * dp[k - 1]) / m;
    }
    prof.values_.assign(N + 1, 0.0);
    prof.values_[N] = dp[N];
    for (std::size_t k = N; k-- > 0;) prof.values_[k] = dp[k] - cp[k] * prof.values_[k + 1];
    return prof;
}

}  // namespace corner::solver
