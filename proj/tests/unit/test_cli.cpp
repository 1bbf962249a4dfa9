#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sys/wait.h>
#include <sstream>

#include "corner/cli/commands.hpp"
#include "corner/cli/svg.hpp"
#include "corner/error.hpp"
#include "doctest.h"

using namespace corner::cli;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

const char *kAnnulus = R"(# annulus
[geometry]
preset = annulus
omega = pi
r0 = 1
R0 = 1
[expansion]
e_max = 8
[rhs]
kind = modal
f_mode = 1
f_amplitude = 1
f_support = 0.6 0.9
[compare]
eps = 0.1 0.05 0.02
points = 12
)";

RunConfig parse(const std::string &text) {
    std::istringstream in(text);
    return parse_config(in);
}

fs::path scratch(const std::string &name) {
    auto p = fs::temp_directory_path() / ("cornerseries_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> data_rows(const fs::path &p) {
    std::ifstream in(p);
    std::vector<std::string> rows;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        rows.push_back(line);
    }
    return rows;
}

int run(std::vector<std::string> args, std::string *err_text = nullptr) {
    args.insert(args.begin(), "cornerseries");
    std::vector<char *> argv;
    for (auto &a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_text) *err_text = err.str();
    return code;
}

fs::path write_config(const fs::path &dir, const std::string &text) {
    auto p = dir / "run.ini";
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("angles") {
    CHECK(parse_angle("pi").radians == doctest::Approx(kPi));
    auto a = parse_angle("3/2 pi");
    REQUIRE(a.over_pi);
    CHECK(*a.over_pi == corner::gps::Rational(3, 2));
    CHECK(a.radians == doctest::Approx(1.5 * kPi));
    CHECK(parse_angle("0.75*pi").radians == doctest::Approx(0.75 * kPi));
    CHECK(parse_angle("2.5").radians == doctest::Approx(2.5));
    CHECK_FALSE(parse_angle("2.5").over_pi);
    CHECK_THROWS_AS(parse_angle("pi 2"), corner::ConfigurationError);
}

TEST_CASE("fnv1a reference values") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("config parsing") {
    auto c = parse(kAnnulus);
    CHECK(c.triple.family == corner::geometry::Family::annular_exact);
    CHECK(c.J == 8);
    CHECK(c.e_max.value() == doctest::Approx(8.0));
    CHECK(c.eps.size() == 3);
    CHECK(c.compare_mode == CompareMode::exact);
    CHECK(c.points == 12);
    CHECK(c.rhs.f.active());
    CHECK_FALSE(c.rhs.F.active());
    CHECK(c.solver.n_theta >= 8 * c.J);
    CHECK(csv_comment(c).rfind("# cornerseries 0.1.0 config_hash=", 0) == 0);
    CHECK(csv_comment(c).size() == std::string("# cornerseries 0.1.0 config_hash=").size() + 16);

    CHECK(parse(std::string(kAnnulus) + "# trailing comment\n").hash != c.hash);

    SUBCASE("unknown keys and sections") {
        CHECK_THROWS_AS(parse("[geometry]\nomga = pi\n"), corner::ConfigurationError);
        CHECK_THROWS_AS(parse("[geometri]\nomega = pi\n"), corner::ConfigurationError);
        CHECK_THROWS_AS(parse("omega = pi\n"), corner::ConfigurationError);
        CHECK_THROWS_AS(parse("[geometry]\njust words\n"), corner::ConfigurationError);
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(parse("[geometry]\nomega = 0\n"), corner::ValidationError);
        CHECK_THROWS_AS(parse("[geometry]\nomega = 3 pi\n"), corner::ValidationError);
        CHECK_THROWS_AS(parse("[expansion]\ne_max = 3\n[basis]\nJ = 1\n"), corner::ValidationError);
        CHECK_THROWS_AS(parse("[rhs]\nf_amplitude = 1\nf_support = 0.2 0.9\n"), corner::ValidationError);
        CHECK_THROWS_AS(parse("[compare]\neps = 0.5\n"), corner::ValidationError);
    }
    SUBCASE("defaults for non-annular presets") {
        auto r = parse("[geometry]\npreset = rounded_corner\nomega = 3/2 pi\n[expansion]\ne_max = 2\n");
        CHECK(r.triple.family == corner::geometry::Family::radial_graph);
        CHECK(r.compare_mode == CompareMode::direct);
        CHECK(r.J == 3);
    }
}

TEST_CASE("loglog slope and sample points") {
    std::vector<double> x{0.1, 0.05, 0.02, 0.01}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
    CHECK(loglog_slope(x, y) == doctest::Approx(2.5).epsilon(1e-12));

    auto c = parse(kAnnulus);
    for (auto region : {Region::global, Region::outer, Region::inner}) {
        auto pts = sample_points(c.triple, 0.05, 20, region);
        REQUIRE(pts.size() == 20);
        for (const auto &p : pts) {
            CHECK(corner::geometry::omega_eps_contains(c.triple, 0.05, p.r, p.theta));
            if (region == Region::outer) CHECK(p.r > 2.0 * c.triple.R0 * 0.05);
            if (region == Region::inner) CHECK(p.r < 0.5 * c.triple.r0);
        }
    }
}

TEST_CASE("svg emitter") {
    std::ostringstream os;
    write_loglog_svg(os, "err", "eps", "error", {{"a", {0.1, 0.01}, {1e-3, 1e-7}}, {"b", {0.1, 0.01}, {1e-4, 1e-6}}});
    const auto s = os.str();
    CHECK(s.find("<svg") != std::string::npos);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("<polyline") != std::string::npos);
    CHECK(s.find(">a<") != std::string::npos);
    CHECK(s.find(">b<") != std::string::npos);
}

TEST_CASE("spectrum rows") {
    auto dir = scratch("spectrum");
    auto cfg = write_config(dir, "[geometry]\nomega = pi\n[expansion]\ne_max = 1\n[basis]\nJ = 3\n");
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "out").string(), "spectrum"}) == 0);
    auto rows = data_rows(dir / "out" / "spectrum.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "1,1,1,-1");
    CHECK(rows[1] == "2,4,2,-2");
    CHECK(rows[2] == "3,9,3,-3");

    cfg = write_config(dir, "[geometry]\nomega = 3/2 pi\n[expansion]\ne_max = 1/2\n[basis]\nJ = 1\n");
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "out2").string(), "spectrum"}) == 0);
    rows = data_rows(dir / "out2" / "spectrum.csv");
    REQUIRE(rows.size() == 1);
    std::istringstream in(rows[0]);
    int j;
    double mu, lp, lm;
    char comma;
    in >> j >> comma >> mu >> comma >> lp >> comma >> lm;
    CHECK(j == 1);
    CHECK(mu == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(lp == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(lm == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("exit codes") {
    auto dir = scratch("exit");
    std::string err;
    auto cfg = write_config(dir, "[geometry]\nomega = 0\n");
    CHECK(run({"--config", cfg.string(), "--out", dir.string(), "spectrum"}, &err) == 2);
    CHECK(err.find("omega") != std::string::npos);

    cfg = write_config(dir, "[geometry]\nbogus = 1\n");
    CHECK(run({"--config", cfg.string(), "--out", dir.string(), "spectrum"}) == 2);

    cfg = write_config(dir, "[geometry]\nomega = pi\n");
    CHECK(run({"--config", cfg.string(), "--out", dir.string(), "compare"}, &err) == 2);
    CHECK(err.find("eps") != std::string::npos);

    CHECK(run({"--config", cfg.string(), "--out", dir.string()}) == 2);
    CHECK(run({"--config", (dir / "missing.ini").string(), "spectrum"}) == 2);
    CHECK(run({"--config", cfg.string(), "frobnicate"}) == 2);
}

TEST_CASE("monoid command") {
    auto dir = scratch("monoid");
    auto cfg = write_config(dir, "[geometry]\nomega = pi\n[expansion]\ne_max = 3\n");
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "a").string(), "monoid"}) == 0);
    auto rows = data_rows(dir / "a" / "monoid.csv");
    REQUIRE(rows.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(rows[k].rfind(std::to_string(k) + "," + std::to_string(k) + ",", 0) == 0);

    cfg = write_config(dir, "[geometry]\nomega = pi\n[expansion]\ne_max = 3\ngenerators = 0.6 1.6\n[basis]\nJ = 1\n");
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "b").string(), "monoid"}) == 0);
    rows = data_rows(dir / "b" / "monoid.csv");
    const std::vector<std::string> expected{"0", "0.6", "1.2", "1.6", "1.8", "2.2", "2.4", "2.8", "3"};
    REQUIRE(rows.size() == expected.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::string> cols;
        std::stringstream s(rows[i]);
        std::string col;
        while (std::getline(s, col, ',')) cols.push_back(col);
        REQUIRE(cols.size() == 4);
        CHECK(std::stod(cols[1]) == doctest::Approx(std::stod(expected[i])).epsilon(1e-12));
        CHECK(cols[3] == "0");
    }
    CHECK(rows[8].find(",5 0,") != std::string::npos);
}

TEST_CASE("expand command") {
    auto dir = scratch("expand");
    auto cfg = write_config(dir, kAnnulus);
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "a").string(), "expand"}) == 0);
    for (auto name : {"tables.csv", "series.csv", "posthoc.csv", "expand_report.csv"}) {
        const auto text = slurp(dir / "a" / name);
        CHECK(text.rfind("# cornerseries ", 0) == 0);
    }
    auto rows = data_rows(dir / "a" / "tables.csv");
    double c0 = 0.0;
    for (const auto &r : rows)
        if (r.rfind("0,1,", 0) == 0) c0 = std::stod(r.substr(4));
    REQUIRE(c0 != 0.0);
    for (const auto &r : rows) {
        std::stringstream s(r);
        std::string e, j, c, B;
        std::getline(s, e, ',');
        std::getline(s, j, ',');
        std::getline(s, c, ',');
        std::getline(s, B, ',');
        if (j != "1") continue;
        const int k = std::stoi(e);
        if (k % 2 == 0) CHECK(std::stod(c) == doctest::Approx(c0).epsilon(1e-13));
        else CHECK(std::stod(B) == doctest::Approx(-c0).epsilon(1e-13));
    }
    auto series = data_rows(dir / "a" / "series.csv");
    CHECK(series.front().rfind("inner,1,1,", 0) == 0);

    auto zero = write_config(dir, "[geometry]\nomega = pi\n[expansion]\ne_max = 2\n");
    REQUIRE(run({"--config", zero.string(), "--out", (dir / "z").string(), "expand"}) == 0);
    CHECK(data_rows(dir / "z" / "tables.csv").empty());
    CHECK(slurp(dir / "z" / "expand_report.csv").find("nonzero_entries,0\n") != std::string::npos);
}

TEST_CASE("compare command on the annulus") {
    auto dir = scratch("compare");
    auto cfg = write_config(dir, kAnnulus);
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "a").string(), "--threads", "2", "compare"}) == 0);
    auto rows = data_rows(dir / "a" / "compare.csv");
    REQUIRE(rows.size() == 9);
    for (const auto &r : rows) {
        std::stringstream s(r);
        std::string eps, kind, abs_err, rel;
        std::getline(s, eps, ',');
        std::getline(s, kind, ',');
        std::getline(s, abs_err, ',');
        std::getline(s, rel, ',');
        CHECK(std::stod(rel) <= 1e-8);
    }
    const auto svg = slurp(dir / "a" / "compare.svg");
    CHECK(svg.find("<polyline") != std::string::npos);
}

TEST_CASE("deterministic outputs") {
    auto dir = scratch("determinism");
    auto cfg = write_config(dir, kAnnulus);
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "a").string(), "--threads", "1", "expand"}) == 0);
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "b").string(), "--threads", "4", "expand"}) == 0);
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "a").string(), "--threads", "1", "compare"}) == 0);
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "b").string(), "--threads", "4", "compare"}) == 0);
    for (auto name : {"tables.csv", "series.csv", "posthoc.csv", "expand_report.csv", "compare.csv", "compare.svg"})
        CHECK_MESSAGE(slurp(dir / "a" / name) == slurp(dir / "b" / name), name);
}

TEST_CASE("oracle dumps") {
    auto dir = scratch("oracle");
    auto cfg = write_config(dir, std::string(kAnnulus) + "[oracle]\nkind = exact\neps = 0.05\n");
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "e").string(), "oracle"}) == 0);
    auto rows = data_rows(dir / "e" / "oracle_exact.csv");
    CHECK(rows.size() > 100);
    CHECK(rows.front().rfind("1,0.05,", 0) == 0);

    cfg = write_config(dir, std::string(kAnnulus) + "[oracle]\nkind = limit_omega\nformat = binary\n");
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "b").string(), "oracle"}) == 0);
    std::ifstream in(dir / "b" / "oracle_limit_omega.lpgf", std::ios::binary);
    auto g = corner::solver::read_binary_grid(in);
    CHECK(g.domain == corner::solver::DomainTag::omega);
    CHECK(g.values.size() > 0);

    cfg = write_config(dir, std::string(kAnnulus) + "[oracle]\nkind = direct\neps = 0.1\n");
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "d").string(), "oracle"}) == 0);
    CHECK(data_rows(dir / "d" / "oracle_direct.csv").size() > 100);
}

TEST_CASE("executable") {
    const char *bin = std::getenv("CORNERSERIES_BIN");
    if (!bin) {
        MESSAGE("CORNERSERIES_BIN not set");
        return;
    }
    auto dir = scratch("exe");
    auto cfg = write_config(dir, kAnnulus);
    const std::string base = std::string(bin) + " --config " + cfg.string() + " --out " + (dir / "o").string();
    auto code = [](int status) { return WIFEXITED(status) ? WEXITSTATUS(status) : -1; };
    CHECK(code(std::system((base + " spectrum > /dev/null").c_str())) == 0);
    CHECK(fs::exists(dir / "o" / "spectrum.csv"));
    auto bad = write_config(dir, "[geometry]\nomega = 0\n");
    CHECK(code(std::system((std::string(bin) + " --config " + bad.string() + " spectrum 2> /dev/null").c_str())) == 2);
    CHECK(code(std::system((std::string(bin) + " --version > /dev/null").c_str())) == 0);
}
