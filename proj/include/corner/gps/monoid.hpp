#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "corner/gps/exponent.hpp"

namespace corner::gps {

// Closure of a finite generator set under addition, truncated at e_max.
class ExponentMonoid {
public:
    ExponentMonoid() = default;

    const std::vector<Exponent> &generators() const { return generators_; }
    const Exponent &e_max() const { return e_max_; }
    const std::vector<Exponent> &elements() const { return elements_; }
    // decompositions()[i][g] is the multiplicity of generator g in element i.
    const std::vector<std::vector<std::int64_t>> &decompositions() const { return decompositions_; }
    std::size_t cluster_warnings() const { return cluster_warnings_; }
    double tolerance() const { return tol_; }

    std::size_t size() const { return elements_.size(); }
    const Exponent &operator[](std::size_t i) const { return elements_[i]; }

    std::optional<std::size_t> index_of(const Exponent &e) const;
    bool contains(const Exponent &e) const { return index_of(e).has_value(); }

    friend ExponentMonoid monoid_generate(const std::vector<Exponent> &generators, const Exponent &e_max,
                                          double tol);

private:
    std::vector<Exponent> generators_;
    Exponent e_max_;
    std::vector<Exponent> elements_;
    std::vector<std::vector<std::int64_t>> decompositions_;
    std::size_t cluster_warnings_ = 0;
    double tol_ = kDefaultDedupTolerance;
};

// Throws InvalidGenerator for a generator <= 0 and PreconditionError for e_max <= 0.
ExponentMonoid monoid_generate(const std::vector<Exponent> &generators, const Exponent &e_max,
                               double tol = kDefaultDedupTolerance);

}  // namespace corner::gps
