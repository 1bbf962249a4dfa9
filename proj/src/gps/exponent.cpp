#include "corner/gps/exponent.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "corner/error.hpp"

namespace corner::gps {

namespace {

using i128 = __int128;

std::optional<Rational> reduce(i128 n, i128 d) {
    if (d == 0) return std::nullopt;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 a = n < 0 ? -n : n;
    i128 b = d;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        n /= a;
        d /= a;
    }
    constexpr i128 lim = std::numeric_limits<std::int64_t>::max();
    if (n > lim || n < -lim || d > lim) return std::nullopt;
    Rational r;
    r.num = static_cast<std::int64_t>(n);
    r.den = static_cast<std::int64_t>(d);
    return r;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw PreconditionError("rational with zero denominator");
    auto r = reduce(n, d);
    num = r->num;
    den = r->den;
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

std::strong_ordering operator<=>(const Rational &a, const Rational &b) {
    i128 l = static_cast<i128>(a.num) * b.den;
    i128 r = static_cast<i128>(b.num) * a.den;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::optional<Rational> checked_add(const Rational &a, const Rational &b) {
    return reduce(static_cast<i128>(a.num) * b.den + static_cast<i128>(b.num) * a.den,
                  static_cast<i128>(a.den) * b.den);
}

std::optional<Rational> checked_sub(const Rational &a, const Rational &b) {
    return reduce(static_cast<i128>(a.num) * b.den - static_cast<i128>(b.num) * a.den,
                  static_cast<i128>(a.den) * b.den);
}

std::optional<Rational> checked_mul(const Rational &a, std::int64_t k) {
    return reduce(static_cast<i128>(a.num) * k, a.den);
}

std::optional<Rational> parse_rational(const std::string &text) {
    auto slash = text.find('/');
    std::int64_t n = 0;
    std::int64_t d = 1;
    const char *b = text.data();
    const char *e = b + text.size();
    if (slash == std::string::npos) {
        auto [p, ec] = std::from_chars(b, e, n);
        if (ec != std::errc() || p != e) return std::nullopt;
    } else {
        auto [p1, ec1] = std::from_chars(b, b + slash, n);
        if (ec1 != std::errc() || p1 != b + slash) return std::nullopt;
        auto [p2, ec2] = std::from_chars(b + slash + 1, e, d);
        if (ec2 != std::errc() || p2 != e || d == 0) return std::nullopt;
    }
    return reduce(n, d);
}

Exponent::Exponent(double value) : value_(value), exact_(std::nullopt) {
    if (!(value >= 0.0) || !std::isfinite(value))
        throw PreconditionError("exponent must be a finite nonnegative real");
}

Exponent::Exponent(const Rational &exact) : value_(exact.value()), exact_(exact) {
    if (exact.num < 0) throw PreconditionError("exponent must be nonnegative");
}

bool Exponent::equals(const Exponent &other, double tol) const {
    if (exact_ && other.exact_) return *exact_ == *other.exact_;
    return std::abs(value_ - other.value_) <= tol;
}

bool Exponent::less(const Exponent &other, double tol) const {
    if (exact_ && other.exact_) return *exact_ < *other.exact_;
    return value_ < other.value_ - tol;
}

Exponent Exponent::operator+(const Exponent &other) const {
    if (exact_ && other.exact_) {
        if (auto s = checked_add(*exact_, *other.exact_)) return Exponent(*s);
    }
    return Exponent(value_ + other.value_);
}

Exponent Exponent::times(std::int64_t k) const {
    if (k < 0) throw PreconditionError("negative exponent multiple");
    if (exact_) {
        if (auto s = checked_mul(*exact_, k)) return Exponent(*s);
    }
    return Exponent(value_ * static_cast<double>(k));
}

std::optional<Exponent> Exponent::minus(const Exponent &other, double tol) const {
    if (exact_ && other.exact_) {
        if (auto d = checked_sub(*exact_, *other.exact_)) {
            if (d->num < 0) return std::nullopt;
            return Exponent(*d);
        }
    }
    double d = value_ - other.value_;
    if (d < -tol) return std::nullopt;
    return Exponent(d < 0.0 ? 0.0 : d);
}

std::string Exponent::str() const {
    if (exact_) return exact_->str();
    return format_double(value_);
}

std::ostream &operator<<(std::ostream &os, const Exponent &e) { return os << e.str(); }

bool ExponentValueLess::operator()(const Exponent &a, const Exponent &b) const {
    if (a.exact() && b.exact()) return *a.exact() < *b.exact();
    return a.value() < b.value();
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, p);
}

}  // namespace corner::gps
