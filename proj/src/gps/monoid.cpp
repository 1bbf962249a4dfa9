#include "corner/gps/monoid.hpp"

#include <algorithm>
#include <cmath>

#include "corner/error.hpp"

namespace corner::gps {

namespace {

// Two float values closer than this are treated as the same real number.
constexpr double kRoundoff = 1e-12;

Exponent combine(const std::vector<Exponent> &gens, const std::vector<std::int64_t> &k) {
    Exponent e = Exponent::zero();
    bool exact = true;
    double v = 0.0;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (k[i] == 0) continue;
        v += static_cast<double>(k[i]) * gens[i].value();
        if (exact) {
            Exponent t = e + gens[i].times(k[i]);
            if (t.is_exact())
                e = t;
            else
                exact = false;
        }
    }
    return exact ? e : Exponent(v);
}

}  // namespace

std::optional<std::size_t> ExponentMonoid::index_of(const Exponent &e) const {
    auto it = std::lower_bound(elements_.begin(), elements_.end(), e,
                               [&](const Exponent &a, const Exponent &b) { return a.less(b, tol_); });
    if (it != elements_.end() && it->equals(e, tol_)) return static_cast<std::size_t>(it - elements_.begin());
    return std::nullopt;
}

ExponentMonoid monoid_generate(const std::vector<Exponent> &generators, const Exponent &e_max, double tol) {
    for (const auto &g : generators) {
        if (g.is_zero(0.0) || g.value() <= 0.0) throw InvalidGenerator("monoid generators must be positive");
    }
    if (e_max.value() <= 0.0) throw PreconditionError("monoid truncation e_max must be positive");

    ExponentMonoid m;
    m.tol_ = tol;
    m.e_max_ = e_max;

    std::vector<Exponent> gens = generators;
    std::sort(gens.begin(), gens.end(), ExponentValueLess{});
    for (const auto &g : gens) {
        if (m.generators_.empty() || !m.generators_.back().equals(g, tol)) m.generators_.push_back(g);
    }
    const std::size_t ng = m.generators_.size();

    struct Item {
        Exponent e;
        std::vector<std::int64_t> k;
    };
    std::vector<Item> items;
    items.push_back({Exponent::zero(), std::vector<std::int64_t>(ng, 0)});

    auto within = [&](const Exponent &e) { return !e_max.less(e, tol); };

    auto insert = [&](Item item) {
        auto it = std::lower_bound(items.begin(), items.end(), item.e,
                                   [&](const Item &a, const Exponent &b) { return a.e.less(b, tol); });
        if (it != items.end() && it->e.equals(item.e, tol)) {
            if (!(it->e.is_exact() && item.e.is_exact())) {
                double d = std::abs(it->e.value() - item.e.value());
                if (d > kRoundoff * std::max(1.0, std::abs(item.e.value()))) ++m.cluster_warnings_;
            }
            return;
        }
        items.insert(it, std::move(item));
    };

    for (std::size_t gi = 0; gi < ng; ++gi) {
        std::vector<Item> snapshot = items;
        for (const auto &base : snapshot) {
            for (std::int64_t k = 1;; ++k) {
                std::vector<std::int64_t> kk = base.k;
                kk[gi] += k;
                Exponent e = combine(m.generators_, kk);
                if (!within(e)) break;
                insert({e, std::move(kk)});
            }
        }
    }

    for (auto &it : items) {
        m.elements_.push_back(it.e);
        m.decompositions_.push_back(std::move(it.k));
    }
    return m;
}

}  // namespace corner::gps
