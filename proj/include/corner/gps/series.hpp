#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "corner/error.hpp"
#include "corner/gps/exponent.hpp"

namespace corner::gps {

template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<double> {
    static bool is_zero(double c) { return c == 0.0; }
    static double norm(double c) { return std::abs(c); }
    static double zero_like(double) { return 0.0; }
    static double identity_like(double) { return 1.0; }
    static std::optional<double> inverse(double c) {
        if (c == 0.0 || !std::isfinite(1.0 / c)) return std::nullopt;
        return 1.0 / c;
    }
    static void write(std::ostream &os, double c) { os << ',' << format_double(c); }
};

template <>
struct CoeffTraits<Eigen::VectorXd> {
    static bool is_zero(const Eigen::VectorXd &c) { return (c.array() == 0.0).all(); }
    static double norm(const Eigen::VectorXd &c) { return c.norm(); }
    static Eigen::VectorXd zero_like(const Eigen::VectorXd &c) { return Eigen::VectorXd::Zero(c.size()); }
    static void write(std::ostream &os, const Eigen::VectorXd &c) {
        for (Eigen::Index i = 0; i < c.size(); ++i) os << ',' << format_double(c[i]);
    }
};

// Frobenius norm, which is submultiplicative.
template <>
struct CoeffTraits<Eigen::MatrixXd> {
    static bool is_zero(const Eigen::MatrixXd &c) { return (c.array() == 0.0).all(); }
    static double norm(const Eigen::MatrixXd &c) { return c.norm(); }
    static Eigen::MatrixXd zero_like(const Eigen::MatrixXd &c) { return Eigen::MatrixXd::Zero(c.rows(), c.cols()); }
    static Eigen::MatrixXd identity_like(const Eigen::MatrixXd &c) {
        if (c.rows() != c.cols()) throw PreconditionError("identity requires square matrix coefficients");
        return Eigen::MatrixXd::Identity(c.rows(), c.cols());
    }
    static std::optional<Eigen::MatrixXd> inverse(const Eigen::MatrixXd &c) {
        if (c.rows() != c.cols() || c.rows() == 0) return std::nullopt;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
        if (!lu.isInvertible()) return std::nullopt;
        return Eigen::MatrixXd(lu.inverse());
    }
    static void write(std::ostream &os, const Eigen::MatrixXd &c) {
        for (Eigen::Index i = 0; i < c.rows(); ++i)
            for (Eigen::Index j = 0; j < c.cols(); ++j) os << ',' << format_double(c(i, j));
    }
};

template <class A, class B>
struct ProductType;
template <>
struct ProductType<double, double> {
    using type = double;
};
template <>
struct ProductType<double, Eigen::VectorXd> {
    using type = Eigen::VectorXd;
};
template <>
struct ProductType<Eigen::VectorXd, double> {
    using type = Eigen::VectorXd;
};
template <>
struct ProductType<double, Eigen::MatrixXd> {
    using type = Eigen::MatrixXd;
};
template <>
struct ProductType<Eigen::MatrixXd, double> {
    using type = Eigen::MatrixXd;
};
template <>
struct ProductType<Eigen::MatrixXd, Eigen::MatrixXd> {
    using type = Eigen::MatrixXd;
};
template <>
struct ProductType<Eigen::MatrixXd, Eigen::VectorXd> {
    using type = Eigen::VectorXd;
};

// Finitely supported generalized power series sum_e c_e X^e. Terms are kept
// sorted by exponent and exact zero coefficients are never stored.
template <class C>
class GenSeries {
public:
    using Term = std::pair<Exponent, C>;

    explicit GenSeries(C zero = C{}, double tol = kDefaultDedupTolerance)
        : zero_(CoeffTraits<C>::zero_like(zero)), tol_(tol) {}

    static GenSeries monomial(const Exponent &e, const C &c, double tol = kDefaultDedupTolerance) {
        GenSeries s(CoeffTraits<C>::zero_like(c), tol);
        s.add_term(e, c);
        return s;
    }

    const std::vector<Term> &terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    const C &zero() const { return zero_; }
    double tolerance() const { return tol_; }

    // Adds c to the coefficient at e, merging with an equal exponent.
    void add_term(const Exponent &e, const C &c) {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                                   [&](const Term &t, const Exponent &x) { return t.first.less(x, tol_); });
        if (it != terms_.end() && it->first.equals(e, tol_)) {
            C sum = it->second + c;
            if (CoeffTraits<C>::is_zero(sum))
                terms_.erase(it);
            else
                it->second = std::move(sum);
            return;
        }
        if (CoeffTraits<C>::is_zero(c)) return;
        terms_.insert(it, Term(e, c));
    }

    C coeff(const Exponent &e) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                                   [&](const Term &t, const Exponent &x) { return t.first.less(x, tol_); });
        if (it != terms_.end() && it->first.equals(e, tol_)) return it->second;
        return zero_;
    }

    C constant_term() const { return coeff(Exponent::zero()); }

private:
    std::vector<Term> terms_;
    C zero_;
    double tol_;
};

template <class C>
GenSeries<C> series_add(const GenSeries<C> &f, const GenSeries<C> &g) {
    GenSeries<C> r = f;
    for (const auto &[e, c] : g.terms()) r.add_term(e, c);
    return r;
}

template <class C>
GenSeries<C> series_scale(const GenSeries<C> &f, double s) {
    GenSeries<C> r(f.zero(), f.tolerance());
    for (const auto &[e, c] : f.terms()) r.add_term(e, C(s * c));
    return r;
}

template <class C>
GenSeries<C> series_sub(const GenSeries<C> &f, const GenSeries<C> &g) {
    return series_add(f, series_scale(g, -1.0));
}

// Cauchy product; exponents above e_max are dropped.
template <class A, class B>
GenSeries<typename ProductType<A, B>::type> series_mul(const GenSeries<A> &f, const GenSeries<B> &g,
                                                        const Exponent &e_max) {
    using R = typename ProductType<A, B>::type;
    const double tol = std::max(f.tolerance(), g.tolerance());
    GenSeries<R> r(R(f.zero() * g.zero()), tol);
    for (const auto &[e1, c1] : f.terms()) {
        for (const auto &[e2, c2] : g.terms()) {
            Exponent e = e1 + e2;
            if (e_max.less(e, tol)) break;
            r.add_term(e, R(c1 * c2));
        }
    }
    return r;
}

template <class C>
std::optional<Exponent> series_valuation(const GenSeries<C> &f) {
    if (f.terms().empty()) return std::nullopt;
    return f.terms().front().first;
}

// Sum_k (-f)^k truncated at e_max; requires a vanishing constant term.
template <class C>
GenSeries<C> series_neumann_inverse(const GenSeries<C> &f, const Exponent &e_max) {
    const double tol = f.tolerance();
    auto v = series_valuation(f);
    if (v && v->is_zero(tol))
        throw PreconditionError(
            "series_neumann_inverse requires a zero constant term; use series_invert for series with an "
            "invertible constant term");
    const C one = CoeffTraits<C>::identity_like(f.zero());
    GenSeries<C> result = GenSeries<C>::monomial(Exponent::zero(), one, tol);
    if (!v) return result;
    const GenSeries<C> minus_f = series_scale(f, -1.0);
    const auto kmax = static_cast<long>(std::floor(e_max.value() / v->value() + 1e-9));
    GenSeries<C> power = result;
    for (long k = 1; k <= kmax; ++k) {
        power = series_mul(power, minus_f, e_max);
        if (power.is_zero()) break;
        result = series_add(result, power);
    }
    return result;
}

// f^{-1} = neumann_inverse(c0^{-1} f - 1) c0^{-1}.
template <class C>
GenSeries<C> series_invert(const GenSeries<C> &f, const Exponent &e_max) {
    const double tol = f.tolerance();
    const C c0 = f.constant_term();
    auto inv = CoeffTraits<C>::inverse(c0);
    if (!inv) throw NonInvertibleError("series_invert: constant term is not invertible");
    const C one = CoeffTraits<C>::identity_like(f.zero());
    GenSeries<C> inv_series = GenSeries<C>::monomial(Exponent::zero(), *inv, tol);
    GenSeries<C> normalized = series_mul(inv_series, f, e_max);
    normalized.add_term(Exponent::zero(), C(-one));
    return series_mul(series_neumann_inverse(normalized, e_max), inv_series, e_max);
}

template <class C>
C series_eval(const GenSeries<C> &f, double xi) {
    if (xi < 0.0) throw PreconditionError("series_eval requires xi >= 0");
    C sum = f.zero();
    for (const auto &[e, c] : f.terms()) sum = sum + C(std::pow(xi, e.value()) * c);
    return sum;
}

template <class C>
double series_norm(const GenSeries<C> &f, double xi) {
    if (xi < 0.0) throw PreconditionError("series_norm requires xi >= 0");
    double sum = 0.0;
    for (const auto &[e, c] : f.terms()) sum += CoeffTraits<C>::norm(c) * std::pow(xi, e.value());
    return sum;
}

// One row per term: "exponent,coeff...", matrices row-major.
template <class C>
void write_series_csv(std::ostream &os, const GenSeries<C> &f) {
    for (const auto &[e, c] : f.terms()) {
        os << e.str();
        CoeffTraits<C>::write(os, c);
        os << '\n';
    }
}

}  // namespace corner::gps
