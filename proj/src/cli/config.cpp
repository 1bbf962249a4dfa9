#include "corner/cli/config.hpp"

#include <algorithm>
#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "corner/engine/tables.hpp"
#include "corner/error.hpp"

namespace corner::cli {

namespace pt = boost::property_tree;

std::uint64_t fnv1a(const std::string &bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::shared_ptr<const solver::Problem> RunConfig::problem() const {
    return std::make_shared<const solver::Problem>(triple, basis, cutoffs(), solver);
}

namespace {

double parse_number(const std::string &key, const std::string &text) {
    const std::string s = boost::trim_copy(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception &) {
        throw ConfigurationError(key + ": expected a number, got '" + text + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ConfigurationError(key + ": expected a number, got '" + text + "'");
    return v;
}

int parse_int(const std::string &key, const std::string &text) {
    const double v = parse_number(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigurationError(key + ": expected an integer, got '" + text + "'");
    return static_cast<int>(v);
}

bool parse_bool(const std::string &key, const std::string &text) {
    const std::string s = boost::to_lower_copy(boost::trim_copy(text));
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw ConfigurationError(key + ": expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string &text) {
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(", \t"), boost::token_compress_on);
    parts.erase(std::remove_if(parts.begin(), parts.end(), [](const std::string &s) { return s.empty(); }), parts.end());
    return parts;
}

std::vector<double> parse_numbers(const std::string &key, const std::string &text) {
    std::vector<double> out;
    for (const auto &p : split_list(text)) out.push_back(parse_number(key, p));
    return out;
}

gps::Exponent parse_exponent(const std::string &key, const std::string &text) {
    const std::string s = boost::trim_copy(text);
    if (s.find('/') != std::string::npos) {
        auto r = gps::parse_rational(s);
        if (!r) throw ConfigurationError(key + ": malformed fraction '" + text + "'");
        return gps::Exponent(*r);
    }
    const double v = parse_number(key, s);
    if (v == std::floor(v) && std::abs(v) < 1e15) return gps::Exponent(gps::Rational(static_cast<std::int64_t>(v)));
    return gps::Exponent(v);
}

geometry::BumpShape parse_shape(const std::string &key, const std::string &text) {
    const std::string s = boost::trim_copy(text);
    if (s == "c2") return geometry::BumpShape::c2;
    if (s == "smooth") return geometry::BumpShape::smooth;
    throw ConfigurationError(key + ": expected c2 or smooth, got '" + text + "'");
}

geometry::BoundaryCurve read_curve_table(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open boundary table " + path);
    std::vector<double> th, r;
    std::string line;
    while (std::getline(in, line)) {
        boost::trim(line);
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        auto parts = split_list(line);
        if (parts.size() != 2) throw ConfigurationError("boundary table rows must be theta,r: " + path);
        th.push_back(parse_number(path, parts[0]));
        r.push_back(parse_number(path, parts[1]));
    }
    if (th.size() < 2) throw ConfigurationError("boundary table needs at least two rows: " + path);
    return geometry::sampled_curve(th, r);
}

std::string resolve(const std::string &base, const std::string &p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? p : (std::filesystem::path(base) / path).string();
}

class Section {
public:
    Section(const pt::ptree &root, const std::string &name, std::set<std::string> allowed)
        : name_(name), allowed_(std::move(allowed)) {
        if (auto child = root.get_child_optional(name)) tree_ = *child;
        for (const auto &kv : tree_)
            if (!allowed_.count(kv.first)) throw ConfigurationError("unknown key [" + name_ + "] " + kv.first);
    }
    std::optional<std::string> get(const std::string &key) const {
        auto v = tree_.get_optional<std::string>(key);
        if (v) return boost::trim_copy(*v);
        return std::nullopt;
    }
    std::string full(const std::string &key) const { return "[" + name_ + "] " + key; }

private:
    std::string name_;
    std::set<std::string> allowed_;
    pt::ptree tree_;
};

}  // namespace

Angle parse_angle(const std::string &text) {
    std::string s = boost::to_lower_copy(boost::trim_copy(text));
    Angle a;
    const auto pos = s.find("pi");
    if (pos == std::string::npos) {
        a.radians = parse_number("omega", s);
        return a;
    }
    if (pos + 2 != s.size()) throw ConfigurationError("omega: 'pi' must come last in '" + text + "'");
    std::string factor = boost::trim_copy(s.substr(0, pos));
    if (!factor.empty() && factor.back() == '*') factor = boost::trim_copy(factor.substr(0, factor.size() - 1));
    if (factor.empty()) factor = "1";
    if (auto r = gps::parse_rational(factor)) {
        a.over_pi = *r;
        a.radians = r->value() * std::numbers::pi;
    } else {
        a.radians = parse_number("omega", factor) * std::numbers::pi;
    }
    return a;
}

RunConfig parse_config(std::istream &in, const std::string &base_dir) {
    std::ostringstream raw;
    raw << in.rdbuf();
    const std::string text = raw.str();

    std::ostringstream cleaned;
    {
        std::istringstream lines(text);
        std::string line;
        int lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            boost::trim(line);
            if (!line.empty() && line.front() != '[' && line.find('=') == std::string::npos)
                throw ConfigurationError("line " + std::to_string(lineno) + ": expected 'key = value' or '[section]'");
            cleaned << line << '\n';
        }
    }
    pt::ptree root;
    try {
        std::istringstream s(cleaned.str());
        pt::read_ini(s, root);
    } catch (const pt::ini_parser_error &e) {
        throw ConfigurationError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    static const std::set<std::string> sections{"geometry", "basis", "rhs", "expansion", "solver", "compare", "oracle"};
    for (const auto &kv : root) {
        if (!sections.count(kv.first)) throw ConfigurationError("unknown section or top-level key '" + kv.first + "'");
        if (kv.second.empty() && !kv.second.data().empty())
            throw ConfigurationError("key '" + kv.first + "' outside of a section");
    }

    RunConfig c;
    c.hash = fnv1a(text);

    // geometry
    Section g(root, "geometry", {"preset", "omega", "r0", "R0", "fillet", "depth", "rho_p_table", "rho_omega_table"});
    const std::string preset = g.get("preset").value_or("annulus");
    const Angle omega = parse_angle(g.get("omega").value_or("pi"));
    const double r0 = parse_number(g.full("r0"), g.get("r0").value_or("1"));
    const double R0 = parse_number(g.full("R0"), g.get("R0").value_or("1"));
    if (!(omega.radians > 0.0) || omega.radians > 2.0 * std::numbers::pi * (1 + 1e-15))
        throw ValidationError("opening angle omega must lie in (0, 2pi]");
    if (!(r0 > 0.0) || !(R0 > 0.0)) throw ValidationError("r0 and R0 must be positive");
    if (preset == "annulus") {
        c.triple = omega.over_pi ? geometry::annulus_exact(*omega.over_pi, r0, R0) : geometry::annulus(omega.radians, r0, R0);
    } else if (preset == "rounded_corner") {
        c.triple = geometry::rounded_corner(omega.radians, parse_number(g.full("fillet"), g.get("fillet").value_or("0.5")),
                                            r0, R0);
    } else if (preset == "notched") {
        c.triple = geometry::notched(omega.radians, parse_number(g.full("depth"), g.get("depth").value_or("0.5")), r0, R0);
    } else if (preset == "custom") {
        c.triple = geometry::annulus(omega.radians, r0, R0);
        c.triple.family = geometry::Family::radial_graph;
        c.triple.name = "custom";
        if (auto p = g.get("rho_p_table")) c.triple.rho_p = read_curve_table(resolve(base_dir, *p));
        if (auto p = g.get("rho_omega_table")) c.triple.rho_omega = read_curve_table(resolve(base_dir, *p));
    } else {
        throw ConfigurationError("[geometry] preset: unknown preset '" + preset + "'");
    }
    if (preset != "custom" && (g.get("rho_p_table") || g.get("rho_omega_table")))
        throw ConfigurationError("[geometry] boundary tables need preset = custom");
    c.triple.omega_over_pi = omega.over_pi;
    geometry::validate_triple(c.triple);

    // expansion (needed before the basis size is fixed)
    Section x(root, "expansion", {"e_max", "generators", "cutoff_width", "posthoc"});
    if (auto v = x.get("e_max")) c.e_max = parse_exponent(x.full("e_max"), *v);
    if (!(c.e_max.value() > 0.0)) throw ValidationError("e_max must be positive");
    if (auto v = x.get("generators"))
        for (const auto &p : split_list(*v)) c.generators.push_back(parse_exponent(x.full("generators"), p));
    c.cutoff_width = parse_number(x.full("cutoff_width"), x.get("cutoff_width").value_or("1"));
    if (!(c.cutoff_width > 0.0)) throw ValidationError("cutoff_width must be positive");
    c.posthoc = parse_bool(x.full("posthoc"), x.get("posthoc").value_or("true"));

    // basis
    Section b(root, "basis", {"J", "n_theta", "mu_file", "psi_file"});
    const double lambda1 = std::numbers::pi / omega.radians;
    if (auto v = b.get("J")) {
        c.J = parse_int(b.full("J"), *v);
        if (c.J < 1) throw ValidationError("J must be >= 1");
    } else {
        c.J = std::max(1, static_cast<int>(std::floor(c.e_max.value() / lambda1 + 1e-12)));
    }
    if (b.get("mu_file") || b.get("psi_file")) {
        if (!b.get("mu_file") || !b.get("psi_file")) throw ConfigurationError("[basis] needs both mu_file and psi_file");
        auto eig = spectral::read_eigendata_csv(2, resolve(base_dir, *b.get("mu_file")), resolve(base_dir, *b.get("psi_file")),
                                                omega.radians);
        if (!b.get("J")) c.J = eig.J();
        if (eig.J() < c.J) throw ValidationError("eigendata files hold fewer than J modes");
        c.basis = std::make_shared<const spectral::SpectralBasis>(std::move(eig));
    } else {
        const int nb = b.get("n_theta") ? parse_int(b.full("n_theta"), *b.get("n_theta")) : std::max(256, 8 * c.J);
        c.basis = std::make_shared<const spectral::SpectralBasis>(
            omega.over_pi ? spectral::sector_eigendata_exact(*omega.over_pi, c.J, nb)
                          : spectral::sector_eigendata(omega.radians, c.J, nb));
    }
    if (c.generators.empty() && engine::required_modes(*c.basis, c.e_max.value()) > c.J)
        throw ValidationError("J = " + std::to_string(c.J) + " is too small for e_max = " + c.e_max.str() +
                              " (need lambda_J^+ > e_max - lambda_1^+)");

    // rhs
    Section r(root, "rhs", {"kind", "f_mode", "f_amplitude", "f_support", "f_shape", "F_mode", "F_amplitude", "F_support",
                            "F_shape"});
    c.rhs = geometry::default_rhs(c.triple);
    if (auto v = r.get("kind")) {
        if (*v == "modal")
            c.rhs.kind = geometry::RhsKind::modal;
        else if (*v == "gridded")
            c.rhs.kind = geometry::RhsKind::gridded;
        else
            throw ConfigurationError("[rhs] kind: expected modal or gridded");
    }
    auto component = [&](const std::string &p, geometry::RhsComponent &comp) {
        if (auto v = r.get(p + "_mode")) comp.mode = parse_int(r.full(p + "_mode"), *v);
        if (auto v = r.get(p + "_amplitude")) comp.amplitude = parse_number(r.full(p + "_amplitude"), *v);
        if (auto v = r.get(p + "_shape")) comp.profile.shape = parse_shape(r.full(p + "_shape"), *v);
        if (auto v = r.get(p + "_support")) {
            auto ab = parse_numbers(r.full(p + "_support"), *v);
            if (ab.size() != 2) throw ConfigurationError(r.full(p + "_support") + ": expected two numbers");
            comp.profile.a = ab[0];
            comp.profile.b = ab[1];
        }
    };
    component("f", c.rhs.f);
    component("F", c.rhs.F);
    geometry::validate_rhs(c.rhs, c.triple, c.J);

    // solver
    Section s(root, "solver", {"h_t", "n_theta", "modal_max_cell", "force_fd", "numeric_matrices", "residual_tol"});
    if (auto v = s.get("h_t")) c.solver.h_t = parse_number(s.full("h_t"), *v);
    if (auto v = s.get("n_theta")) c.solver.n_theta = parse_int(s.full("n_theta"), *v);
    if (auto v = s.get("modal_max_cell")) c.solver.modal_max_cell = parse_number(s.full("modal_max_cell"), *v);
    if (auto v = s.get("force_fd")) c.solver.force_fd = parse_bool(s.full("force_fd"), *v);
    if (auto v = s.get("numeric_matrices")) c.solver.numeric_matrices = parse_bool(s.full("numeric_matrices"), *v);
    if (auto v = s.get("residual_tol")) c.solver.residual_tol = parse_number(s.full("residual_tol"), *v);
    if (!(c.solver.h_t > 0.0) || !(c.solver.modal_max_cell > 0.0) || !(c.solver.residual_tol > 0.0))
        throw ValidationError("solver step sizes and tolerances must be positive");
    if (!s.get("n_theta")) c.solver.n_theta = std::max(c.solver.n_theta, 8 * c.J);
    if (c.solver.n_theta <= c.J) throw ValidationError("[solver] n_theta must exceed J");

    // compare
    Section cm(root, "compare", {"eps", "mode", "points"});
    if (auto v = cm.get("eps")) c.eps = parse_numbers(cm.full("eps"), *v);
    if (auto v = cm.get("mode")) {
        if (*v == "exact")
            c.compare_mode = CompareMode::exact;
        else if (*v == "direct")
            c.compare_mode = CompareMode::direct;
        else
            throw ConfigurationError("[compare] mode: expected exact or direct");
    } else {
        c.compare_mode = c.triple.family == geometry::Family::annular_exact ? CompareMode::exact : CompareMode::direct;
    }
    if (auto v = cm.get("points")) c.points = parse_int(cm.full("points"), *v);
    if (c.points < 1) throw ValidationError("[compare] points must be >= 1");
    for (double e : c.eps)
        if (!(e > 0.0) || e > c.triple.eps_max() * (1 + 1e-12))
            throw ValidationError("[compare] eps values must lie in (0, eps0/4]");

    // oracle
    Section o(root, "oracle", {"kind", "eps", "format"});
    if (auto v = o.get("kind")) {
        static const std::map<std::string, OracleKind> kinds{{"direct", OracleKind::direct},
                                                             {"exact", OracleKind::exact},
                                                             {"limit_omega", OracleKind::limit_omega},
                                                             {"limit_pattern", OracleKind::limit_pattern}};
        auto it = kinds.find(*v);
        if (it == kinds.end()) throw ConfigurationError("[oracle] kind: unknown kind '" + *v + "'");
        c.oracle_kind = it->second;
    }
    if (auto v = o.get("eps")) c.oracle_eps = parse_number(o.full("eps"), *v);
    if (auto v = o.get("format")) {
        if (*v == "csv")
            c.oracle_format = DumpFormat::csv;
        else if (*v == "binary")
            c.oracle_format = DumpFormat::binary;
        else
            throw ConfigurationError("[oracle] format: expected csv or binary");
    }
    return c;
}

RunConfig load_config(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigurationError("cannot open config file " + path);
    return parse_config(in, std::filesystem::path(path).parent_path().string());
}

}  // namespace corner::cli
