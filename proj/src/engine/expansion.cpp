#include "corner/engine/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "corner/error.hpp"
#include "corner/parallel.hpp"

namespace corner::engine {

using geometry::CutoffKind;
using spectral::Sign;

CanonicalProfile::CanonicalProfile(solver::FieldPtr Y, int j, Sign sign, geometry::Cutoffs cutoffs,
                                   std::shared_ptr<const spectral::SpectralBasis> basis)
    : Field(Y->omega(), Y->domain(), Y->scale()),
      Y_(std::move(Y)),
      j_(j),
      sign_(sign),
      cutoffs_(cutoffs),
      basis_(std::move(basis)) {}

double CanonicalProfile::value(double r, double theta) const {
    const double cut = cutoffs_.eval(sign_ == Sign::plus ? CutoffKind::Phi : CutoffKind::phi, r, 0);
    const double h = cut == 0.0 ? 0.0 : cut * spectral::h_eval(*basis_, j_, sign_, r, theta);
    return h - Y_->value(r, theta);
}

Expansion build_expansion(std::shared_ptr<const solver::Problem> problem, const geometry::RhsSpec &rhs,
                          const gps::Exponent &e_max, int J) {
    if (!problem) throw PreconditionError("build_expansion: missing problem");
    const auto &p = *problem;
    if (J < 1 || J > p.basis().J()) throw PreconditionError("build_expansion: J outside 1..basis size");
    Expansion x;
    x.problem = problem;
    x.u0 = solver::solve_limit_omega(p, rhs);
    x.U0 = solver::solve_limit_pattern(p, rhs);
    x.Y = solver::compute_correctors(p, J);
    const bool analytic = p.triple().family == geometry::Family::annular_exact && !p.config().numeric_matrices;
    solver::InteractionMatrices m = analytic ? solver::interaction_matrices(p, J) : solver::interaction_matrices(p, x.Y);
    auto monoid = expansion_monoid(p.basis(), J, e_max);
    x.tables = recursive_coefficients(x.u0.trace.coefficients.head(J), x.U0.trace.coefficients.head(J), m, monoid,
                                      p.basis_ptr());
    return x;
}

double EvalResult::max_indicator() const {
    double m = 0.0;
    for (double v : indicator) m = std::max(m, v);
    return m;
}

namespace {

struct Term {
    double total = 0.0;  // power of eps
    int j = 0;           // 1-based mode, 0 for the limit field
    double coef = 0.0;
    bool last_band = false;
    bool slow = true;  // global: u-part (true) or U-part (false)
};

void sort_terms(std::vector<Term> &terms) {
    std::stable_sort(terms.begin(), terms.end(), [](const Term &a, const Term &b) {
        if (a.total != b.total) return a.total < b.total;
        return a.j < b.j;
    });
}

double band_floor(const Expansion &x) {
    return x.tables.e_max().value() - 2.0 * x.tables.basis->mode(1).lambda_plus + x.tables.monoid.tolerance();
}

void check_eps(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("evaluation needs eps > 0");
}

std::string point_str(const Point &pt) {
    std::ostringstream s;
    s << "(r = " << pt.r << ", theta = " << pt.theta << ")";
    return s.str();
}

int threads_of(const Expansion &x) { return x.problem->config().threads; }

EvalResult evaluate(const std::vector<Term> &terms, const std::vector<Point> &points, int threads, double eps,
                    const std::function<double(const Term &, const Point &, std::vector<double> &)> &field_value,
                    int cache_size) {
    EvalResult res;
    res.values.assign(points.size(), 0.0);
    res.indicator.assign(points.size(), 0.0);
    res.terms = terms.size();
    std::vector<double> powers(terms.size());
    for (std::size_t k = 0; k < terms.size(); ++k) powers[k] = std::pow(eps, terms[k].total);
    parallel_for(static_cast<int>(points.size()), threads, [&](int i) {
        std::vector<double> cache(static_cast<std::size_t>(cache_size), std::numeric_limits<double>::quiet_NaN());
        double sum = 0.0, ind = 0.0;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            const double v = terms[k].coef * powers[k] * field_value(terms[k], points[i], cache);
            sum += v;
            if (terms[k].last_band) ind += std::abs(v);
        }
        res.values[i] = sum;
        res.indicator[i] = ind;
    });
    return res;
}

}  // namespace

EvalResult outer_eval(const Expansion &x, double eps, const std::vector<Point> &points) {
    check_eps(eps);
    const auto &p = *x.problem;
    const auto &t = p.triple();
    for (const auto &pt : points)
        if (!(pt.r > 2.0 * t.R0 * eps) || !geometry::omega_eps_contains(t, eps, pt.r, pt.theta))
            throw OutOfDomain("outer_eval: point " + point_str(pt) + " outside the outer region");
    const int J = x.J();
    std::vector<Term> terms{{0.0, 0, 1.0, false, true}};
    const double floor = band_floor(x);
    for (std::size_t i = 0; i < x.tables.monoid.size(); ++i) {
        const double e = x.tables.monoid[i].value();
        for (int j = 1; j <= J; ++j) {
            const double b = x.tables.B[i](j - 1);
            if (b == 0.0) continue;
            terms.push_back({e - p.basis().mode(j).lambda_minus, j, b, e > floor, true});
        }
    }
    sort_terms(terms);
    std::vector<CanonicalProfile> K;
    for (int j = 1; j <= J; ++j) K.emplace_back(x.Y.minus[j - 1], j, Sign::minus, p.cutoffs(), p.basis_ptr());
    const auto &u0 = *x.u0.field;
    return evaluate(
        terms, points, threads_of(x), eps,
        [&](const Term &term, const Point &pt, std::vector<double> &cache) {
            double &c = cache[term.j];
            if (std::isnan(c)) c = term.j == 0 ? u0.value(pt.r, pt.theta) : K[term.j - 1].value(pt.r, pt.theta);
            return c;
        },
        J + 1);
}

EvalResult inner_eval(const Expansion &x, double eps, const std::vector<Point> &points) {
    check_eps(eps);
    const auto &p = *x.problem;
    const auto &t = p.triple();
    for (const auto &pt : points)
        if (!(pt.r < 0.5 * t.r0) || !geometry::omega_eps_contains(t, eps, pt.r, pt.theta))
            throw OutOfDomain("inner_eval: point " + point_str(pt) + " outside the inner region");
    const int J = x.J();
    std::vector<Term> terms{{0.0, 0, 1.0, false, false}};
    const double floor = band_floor(x);
    for (std::size_t i = 0; i < x.tables.monoid.size(); ++i) {
        const double e = x.tables.monoid[i].value();
        for (int j = 1; j <= J; ++j) {
            const double c = x.tables.c[i](j - 1);
            if (c == 0.0) continue;
            terms.push_back({e + p.basis().mode(j).lambda_plus, j, c, e > floor, false});
        }
    }
    sort_terms(terms);
    std::vector<CanonicalProfile> K;
    for (int j = 1; j <= J; ++j) K.emplace_back(x.Y.plus[j - 1], j, Sign::plus, p.cutoffs(), p.basis_ptr());
    const auto &U0 = *x.U0.field;
    return evaluate(
        terms, points, threads_of(x), eps,
        [&](const Term &term, const Point &pt, std::vector<double> &cache) {
            double &c = cache[term.j];
            if (std::isnan(c)) {
                const double R = pt.r / eps;
                c = term.j == 0 ? U0.value(R, pt.theta) : K[term.j - 1].value(R, pt.theta);
            }
            return c;
        },
        J + 1);
}

EvalResult global_eval(const Expansion &x, double eps, const std::vector<Point> &points) {
    check_eps(eps);
    const auto &p = *x.problem;
    const auto &t = p.triple();
    for (const auto &pt : points)
        if (!geometry::omega_eps_contains(t, eps, pt.r, pt.theta))
            throw OutOfDomain("global_eval: point " + point_str(pt) + " outside Omega_eps");
    const int J = x.J();
    std::vector<Term> terms{{0.0, 0, 1.0, false, true}, {0.0, 0, 1.0, false, false}};
    const double floor = band_floor(x);
    for (std::size_t i = 1; i < x.tables.monoid.size(); ++i) {
        const auto &e = x.tables.monoid[i];
        const Eigen::VectorXd vm = pi_shift(x.tables, Sign::minus, e);
        const Eigen::VectorXd vp = pi_shift(x.tables, Sign::plus, e);
        for (int j = 1; j <= J; ++j) {
            if (vm(j - 1) != 0.0) terms.push_back({e.value(), j, -vm(j - 1), e.value() > floor, true});
            if (vp(j - 1) != 0.0) terms.push_back({e.value(), j, -vp(j - 1), e.value() > floor, false});
        }
    }
    sort_terms(terms);
    const auto &cut = p.cutoffs();
    const auto &u0 = *x.u0.field;
    const auto &U0 = *x.U0.field;
    // cache layout: [0, J] slow fields, [J+1, 2J+1] rapid fields, then the two cutoff values.
    return evaluate(
        terms, points, threads_of(x), eps,
        [&](const Term &term, const Point &pt, std::vector<double> &cache) {
            double &Phi = cache[2 * J + 2];
            double &phi = cache[2 * J + 3];
            if (std::isnan(Phi)) {
                Phi = cut.eval(CutoffKind::Phi, pt.r / eps, 0);
                phi = cut.eval(CutoffKind::phi, pt.r, 0);
            }
            if (term.slow) {
                if (Phi == 0.0) return 0.0;
                double &c = cache[term.j];
                if (std::isnan(c))
                    c = term.j == 0 ? u0.value(pt.r, pt.theta) : x.Y.minus[term.j - 1]->value(pt.r, pt.theta);
                return Phi * c;
            }
            if (phi == 0.0) return 0.0;
            double &c = cache[J + 1 + term.j];
            if (std::isnan(c)) {
                const double R = pt.r / eps;
                c = term.j == 0 ? U0.value(R, pt.theta) : x.Y.plus[term.j - 1]->value(R, pt.theta);
            }
            return phi * c;
        },
        2 * J + 4);
}

namespace {

solver::Source scaled(const solver::Source &s, double a) {
    solver::Source out;
    for (const auto &m : s.modal) {
        auto piece = m.piece;
        piece.fn = [fn = m.piece.fn, a](double t) { return a * fn(t); };
        out.modal.push_back({m.mode, piece});
    }
    if (s.gridded) out.gridded = [g = s.gridded, a](double t, double th) { return a * g(t, th); };
    return out;
}

solver::FieldPtr reconstruct(const Expansion &x, std::size_t level, Sign sign) {
    const auto &p = *x.problem;
    const bool slow = sign == Sign::minus;
    if (level >= x.tables.monoid.size()) throw PreconditionError("reconstruct: level outside the monoid");
    if (level == 0) return slow ? x.u0.field : x.U0.field;
    const Eigen::VectorXd v = pi_shift(x.tables, sign, x.tables.monoid[level]);
    solver::Source src;
    for (int j = 1; j <= x.J(); ++j)
        if (v(j - 1) != 0.0) src.append(scaled(p.corrector_source(j, sign), -v(j - 1)));
    const auto domain = slow ? solver::DomainTag::omega : solver::DomainTag::pattern;
    const auto scale = slow ? solver::ScaleFlag::slow : solver::ScaleFlag::rapid;
    if (src.empty()) return std::make_shared<solver::ZeroField>(p.triple().omega, domain, scale);
    return p.solve(domain, src);
}

}  // namespace

solver::FieldPtr reconstruct_slow(const Expansion &x, std::size_t level) { return reconstruct(x, level, Sign::minus); }

solver::FieldPtr reconstruct_rapid(const Expansion &x, std::size_t level) { return reconstruct(x, level, Sign::plus); }

ConsistencyReport posthoc_consistency(const Expansion &x) {
    const auto &p = *x.problem;
    const std::size_t n = x.tables.monoid.size();
    const int J = x.J();
    ConsistencyReport r;
    r.c_deviation.assign(n, 0.0);
    r.B_deviation.assign(n, 0.0);
    parallel_for(static_cast<int>(2 * n), p.config().threads, [&](int task) {
        const std::size_t i = static_cast<std::size_t>(task) % n;
        if (static_cast<std::size_t>(task) < n) {
            auto u = reconstruct_slow(x, i);
            auto tr = spectral::averaged_trace(*u, p.omega_extraction_radii(), Sign::plus, p.basis());
            r.c_deviation[i] = (tr.coefficients.head(J) - x.tables.c[i]).cwiseAbs().maxCoeff();
        } else {
            auto U = reconstruct_rapid(x, i);
            auto tr = spectral::averaged_trace(*U, p.pattern_extraction_radii(), Sign::minus, p.basis());
            r.B_deviation[i] = (tr.coefficients.head(J) - x.tables.B[i]).cwiseAbs().maxCoeff();
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        r.max_c = std::max(r.max_c, r.c_deviation[i]);
        r.max_B = std::max(r.max_B, r.B_deviation[i]);
    }
    return r;
}

}  // namespace corner::engine
