#include "corner/engine/tables.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "corner/error.hpp"

namespace corner::engine {

using gps::Exponent;
using spectral::Sign;

gps::ExponentMonoid expansion_monoid(const spectral::SpectralBasis &basis, int J, const Exponent &e_max, double tol) {
    if (J < 1 || J > basis.J()) throw PreconditionError("expansion_monoid: J out of range");
    std::vector<Exponent> gens;
    for (int j = 1; j <= J; ++j) {
        for (const Exponent &g : {basis.lambda_plus_exponent(j), basis.minus_lambda_minus_exponent(j)}) {
            bool dup = std::any_of(gens.begin(), gens.end(), [&](const Exponent &x) { return x.equals(g, tol); });
            if (!dup) gens.push_back(g);
        }
    }
    std::sort(gens.begin(), gens.end(), gps::ExponentValueLess{});
    return gps::monoid_generate(gens, e_max, tol);
}

int required_modes(const spectral::SpectralBasis &basis, double e_max) {
    const double l1 = basis.mode(1).lambda_plus;
    for (int j = 1; j <= basis.J(); ++j)
        if (basis.mode(j).lambda_plus > e_max - l1 + 1e-12) return j;
    return basis.J() + 1;
}

Eigen::VectorXd pi_shift(const CoefficientTables &t, Sign sign, const Exponent &e) {
    const int J = t.J();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(J);
    const double tol = t.monoid.tolerance();
    for (int j = 1; j <= J; ++j) {
        const Exponent shift =
            sign == Sign::plus ? t.basis->lambda_plus_exponent(j) : t.basis->minus_lambda_minus_exponent(j);
        auto d = e.minus(shift, tol);
        if (!d) continue;
        auto idx = t.monoid.index_of(*d);
        if (!idx) continue;
        const auto &table = sign == Sign::plus ? t.c : t.B;
        if (*idx < table.size()) out(j - 1) = table[*idx](j - 1);
    }
    return out;
}

namespace {

// Largest monoid index read by pi_shift at element i; -1 when nothing is read.
long max_read_index(const CoefficientTables &t, Sign sign, std::size_t i) {
    long worst = -1;
    const double tol = t.monoid.tolerance();
    for (int j = 1; j <= t.J(); ++j) {
        const Exponent shift =
            sign == Sign::plus ? t.basis->lambda_plus_exponent(j) : t.basis->minus_lambda_minus_exponent(j);
        auto d = t.monoid[i].minus(shift, tol);
        if (!d) continue;
        if (auto idx = t.monoid.index_of(*d)) worst = std::max(worst, static_cast<long>(*idx));
    }
    return worst;
}

}  // namespace

CoefficientTables recursive_coefficients(const Eigen::VectorXd &c0, const Eigen::VectorXd &B0,
                                         const solver::InteractionMatrices &matrices, const gps::ExponentMonoid &monoid,
                                         std::shared_ptr<const spectral::SpectralBasis> basis) {
    if (!basis) throw PreconditionError("recursive_coefficients: missing basis");
    const long J = matrices.S_P.cols();
    if (matrices.S_P.rows() != J || matrices.S_Omega.rows() != J || matrices.S_Omega.cols() != J)
        throw PreconditionError("recursive_coefficients: interaction matrices must be square of equal size");
    if (c0.size() != J || B0.size() != J) throw PreconditionError("recursive_coefficients: dimension mismatch");
    if (J > basis->J()) throw PreconditionError("recursive_coefficients: basis has fewer modes than the matrices");
    if (monoid.size() == 0 || !monoid[0].is_zero(monoid.tolerance()))
        throw PreconditionError("recursive_coefficients: monoid must start at 0");
    const double e_max = monoid.e_max().value();
    const double l1 = basis->mode(1).lambda_plus;
    if (!(basis->mode(static_cast<int>(J)).lambda_plus > e_max - l1 + 1e-12)) {
        std::ostringstream msg;
        msg << "recursive_coefficients: J = " << J << " is too small for e_max = " << e_max
            << " (need lambda_J^+ > e_max - lambda_1^+, J >= " << required_modes(*basis, e_max) << ")";
        throw PreconditionError(msg.str());
    }

    CoefficientTables t;
    t.monoid = monoid;
    t.matrices = matrices;
    t.basis = std::move(basis);
    t.c.reserve(monoid.size());
    t.B.reserve(monoid.size());
    t.c.push_back(c0);
    t.B.push_back(B0);
    for (std::size_t i = 1; i < monoid.size(); ++i) {
        if (max_read_index(t, Sign::plus, i) >= static_cast<long>(i) ||
            max_read_index(t, Sign::minus, i) >= static_cast<long>(i))
            throw PreconditionError("recursive_coefficients: recursion reads a non-smaller exponent");
        const Exponent &e = monoid[i];
        t.B.push_back(-(matrices.S_P * pi_shift(t, Sign::plus, e)));
        t.c.push_back(-(matrices.S_Omega * pi_shift(t, Sign::minus, e)));
    }
    return t;
}

gps::GenSeries<double> mode_series(const CoefficientTables &t, int j, Side side) {
    if (j < 1 || j > t.J()) throw PreconditionError("mode_series: mode out of range");
    gps::GenSeries<double> s(0.0, t.monoid.tolerance());
    const Exponent shift =
        side == Side::inner ? t.basis->lambda_plus_exponent(j) : t.basis->minus_lambda_minus_exponent(j);
    for (std::size_t i = 0; i < t.monoid.size(); ++i) {
        const double v = side == Side::inner ? t.c[i](j - 1) : t.B[i](j - 1);
        if (v != 0.0) s.add_term(t.monoid[i] + shift, v);
    }
    return s;
}

void write_tables_csv(std::ostream &os, const CoefficientTables &t) {
    os << "e,j,c,B\n";
    for (std::size_t i = 0; i < t.monoid.size(); ++i)
        for (int j = 1; j <= t.J(); ++j) {
            const double c = t.c[i](j - 1) + 0.0, b = t.B[i](j - 1) + 0.0;
            if (c == 0.0 && b == 0.0) continue;
            os << t.monoid[i].str() << ',' << j << ',' << gps::format_double(c) << ',' << gps::format_double(b)
               << '\n';
        }
}

std::size_t nonzero_entries(const CoefficientTables &t) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.monoid.size(); ++i)
        for (int j = 0; j < t.J(); ++j) n += (t.c[i](j) != 0.0) + (t.B[i](j) != 0.0);
    return n;
}

double estimate_epsilon_star(const solver::InteractionMatrices &m, const spectral::SpectralBasis &basis) {
    const long J = m.S_P.cols();
    if (!m.S_P.allFinite() || !m.S_Omega.allFinite()) throw PreconditionError("estimate_epsilon_star: non-finite matrix");
    if (J > basis.J()) throw PreconditionError("estimate_epsilon_star: basis has fewer modes than the matrices");
    auto g = [&](double eps) {
        double s = 0.0;
        for (long j = 0; j < J; ++j) {
            const auto &mode = basis.mode(static_cast<int>(j) + 1);
            s += m.S_P.col(j).cwiseAbs().maxCoeff() * std::pow(eps, mode.lambda_plus);
            s += m.S_Omega.col(j).cwiseAbs().maxCoeff() * std::pow(eps, -mode.lambda_minus);
        }
        return s;
    };
    double lo = 0.0, hi = 1.0;
    while (g(hi) < 1.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) return lo;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 1.0 ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace corner::engine
