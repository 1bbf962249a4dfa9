#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "corner/cli/config.hpp"
#include "corner/engine/expansion.hpp"

namespace corner::cli {

struct CommandOptions {
    std::string out_dir = ".";
    int threads = 1;
    bool verbose = false;
};

struct CommandResult {
    std::vector<std::string> files;
};

// "# cornerseries <version> config_hash=<16 hex digits>"
std::string csv_comment(const RunConfig &c);

CommandResult cmd_spectrum(const RunConfig &c, const CommandOptions &o, std::ostream &log);
CommandResult cmd_monoid(const RunConfig &c, const CommandOptions &o, std::ostream &log);
CommandResult cmd_expand(const RunConfig &c, const CommandOptions &o, std::ostream &log);
CommandResult cmd_compare(const RunConfig &c, const CommandOptions &o, std::ostream &log);
CommandResult cmd_oracle(const RunConfig &c, const CommandOptions &o, std::ostream &log);

enum class Region { global, outer, inner };

// n deterministic points of Omega_eps in the validity region of the given evaluation.
std::vector<engine::Point> sample_points(const geometry::GeneratingTriple &t, double eps, int n, Region region);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

// Parses argv, runs one command and maps errors to exit codes:
// 0 success, 1 internal or numerical failure, 2 configuration or validation error.
int run_cli(int argc, char **argv, std::ostream &out, std::ostream &err);

}  // namespace corner::cli
