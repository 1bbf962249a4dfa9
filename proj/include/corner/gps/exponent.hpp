#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace corner::gps {

inline constexpr double kDefaultDedupTolerance = 1e-9;

// Signed reduced fraction num/den with den > 0.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    friend bool operator==(const Rational &a, const Rational &b) { return a.num == b.num && a.den == b.den; }
    friend std::strong_ordering operator<=>(const Rational &a, const Rational &b);
};

// Overflowing results are reported as nullopt instead of wrapping.
std::optional<Rational> checked_add(const Rational &a, const Rational &b);
std::optional<Rational> checked_sub(const Rational &a, const Rational &b);
std::optional<Rational> checked_mul(const Rational &a, std::int64_t k);

// Parses "p/q" or an integer.
std::optional<Rational> parse_rational(const std::string &text);

// A nonnegative real, optionally carrying its exact rational form.
class Exponent {
public:
    Exponent() = default;
    explicit Exponent(double value);
    explicit Exponent(const Rational &exact);

    static Exponent zero() { return Exponent(Rational(0)); }

    double value() const { return value_; }
    const std::optional<Rational> &exact() const { return exact_; }
    bool is_exact() const { return exact_.has_value(); }

    bool equals(const Exponent &other, double tol = kDefaultDedupTolerance) const;
    // Strict order consistent with equals(): a < b only when not equal.
    bool less(const Exponent &other, double tol = kDefaultDedupTolerance) const;

    // Exact when both operands are exact and the arithmetic does not overflow.
    Exponent operator+(const Exponent &other) const;
    Exponent times(std::int64_t k) const;
    // a - b, or nullopt when the difference is negative beyond tolerance.
    std::optional<Exponent> minus(const Exponent &other, double tol = kDefaultDedupTolerance) const;

    bool is_zero(double tol = kDefaultDedupTolerance) const { return equals(zero(), tol); }

    // "p/q" (or "p") when exact, otherwise shortest round-trip decimal.
    std::string str() const;

private:
    double value_ = 0.0;
    std::optional<Rational> exact_ = Rational(0);
};

std::ostream &operator<<(std::ostream &os, const Exponent &e);

// Orders by value; used for sorted containers where dedup already happened.
struct ExponentValueLess {
    bool operator()(const Exponent &a, const Exponent &b) const;
};

std::string format_double(double v);

}  // namespace corner::gps
