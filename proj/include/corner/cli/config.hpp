#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "corner/geometry/cutoff.hpp"
#include "corner/geometry/rhs.hpp"
#include "corner/geometry/triple.hpp"
#include "corner/gps/exponent.hpp"
#include "corner/solver/problems.hpp"
#include "corner/spectral/basis.hpp"

namespace corner::cli {

inline constexpr const char *kVersion = "0.1.0";

enum class CompareMode { exact, direct };
enum class OracleKind { direct, exact, limit_omega, limit_pattern };
enum class DumpFormat { csv, binary };

struct RunConfig {
    geometry::GeneratingTriple triple;
    std::shared_ptr<const spectral::SpectralBasis> basis;
    int J = 0;
    geometry::RhsSpec rhs;
    gps::Exponent e_max = gps::Exponent(gps::Rational(3));
    // Explicit monoid generators; empty means the basis exponent set.
    std::vector<gps::Exponent> generators;
    double cutoff_width = 1.0;
    bool posthoc = true;
    solver::SolverConfig solver;

    std::vector<double> eps;
    CompareMode compare_mode = CompareMode::exact;
    int points = 20;

    OracleKind oracle_kind = OracleKind::direct;
    double oracle_eps = 0.05;
    DumpFormat oracle_format = DumpFormat::csv;

    std::uint64_t hash = 0;

    geometry::Cutoffs cutoffs() const { return {triple.r0, triple.R0, cutoff_width}; }
    std::shared_ptr<const solver::Problem> problem() const;
};

// FNV-1a, 64 bit.
std::uint64_t fnv1a(const std::string &bytes);

// Grammar (one item per line, '#' starts a comment):
//   [section]
//   key = value
// Sections and keys are listed in README.md. Throws ConfigurationError for
// syntax and unknown keys, ValidationError for inconsistent data.
RunConfig parse_config(std::istream &in, const std::string &base_dir = ".");
RunConfig load_config(const std::string &path);

// "p/q pi", "x pi", "pi" or plain radians.
struct Angle {
    double radians = 0.0;
    std::optional<gps::Rational> over_pi;
};
Angle parse_angle(const std::string &text);

}  // namespace corner::cli
