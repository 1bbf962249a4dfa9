#include "corner/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "corner/cli/svg.hpp"
#include "corner/engine/tables.hpp"
#include "corner/error.hpp"
#include "corner/gps/monoid.hpp"
#include "corner/solver/grid.hpp"

namespace corner::cli {

using gps::format_double;

std::string csv_comment(const RunConfig &c) {
    std::ostringstream s;
    s << "# cornerseries " << kVersion << " config_hash=" << std::hex << std::setw(16) << std::setfill('0') << c.hash;
    return s.str();
}

namespace {

std::string open_output(const CommandOptions &o, const std::string &name, std::ofstream &out, CommandResult &res,
                        bool binary = false) {
    std::filesystem::create_directories(o.out_dir);
    const std::string path = (std::filesystem::path(o.out_dir) / name).string();
    out.open(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot write " + path);
    res.files.push_back(path);
    return path;
}

RunConfig with_threads(const RunConfig &c, const CommandOptions &o) {
    RunConfig r = c;
    r.solver.threads = std::max(1, o.threads);
    return r;
}

std::string fmt(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

}  // namespace

CommandResult cmd_spectrum(const RunConfig &c, const CommandOptions &o, std::ostream &log) {
    CommandResult res;
    std::ofstream out;
    open_output(o, "spectrum.csv", out, res);
    out << csv_comment(c) << "\nj,mu,lambda_plus,lambda_minus\n";
    for (int j = 1; j <= c.J; ++j) {
        const auto &m = c.basis->mode(j);
        out << j << ',' << format_double(m.mu) << ',' << format_double(m.lambda_plus) << ','
            << format_double(m.lambda_minus) << '\n';
    }
    if (o.verbose) log << "spectrum: " << c.J << " modes\n";
    return res;
}

CommandResult cmd_monoid(const RunConfig &c, const CommandOptions &o, std::ostream &log) {
    CommandResult res;
    std::vector<gps::Exponent> gens = c.generators;
    if (gens.empty()) {
        for (int j = 1; j <= c.J; ++j) {
            for (const auto &g : {c.basis->lambda_plus_exponent(j), c.basis->minus_lambda_minus_exponent(j)})
                if (std::none_of(gens.begin(), gens.end(), [&](const gps::Exponent &x) { return x.equals(g); }))
                    gens.push_back(g);
        }
        std::sort(gens.begin(), gens.end(), gps::ExponentValueLess{});
    }
    const auto m = gps::monoid_generate(gens, c.e_max);
    std::ofstream out;
    open_output(o, "monoid.csv", out, res);
    out << csv_comment(c) << "\n# generators:";
    for (const auto &g : m.generators()) out << ' ' << g.str();
    out << "\ne,value,multiplicities,cluster_warnings\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << m[i].str() << ',' << format_double(m[i].value()) << ',';
        const auto &d = m.decompositions()[i];
        for (std::size_t k = 0; k < d.size(); ++k) out << (k ? " " : "") << d[k];
        out << ',' << m.cluster_warnings() << '\n';
    }
    if (o.verbose) log << "monoid: " << m.size() << " elements, " << m.cluster_warnings() << " cluster warnings\n";
    return res;
}

CommandResult cmd_expand(const RunConfig &c0, const CommandOptions &o, std::ostream &log) {
    const RunConfig c = with_threads(c0, o);
    CommandResult res;
    auto p = c.problem();
    auto x = engine::build_expansion(p, c.rhs, c.e_max, c.J);
    {
        std::ofstream out;
        open_output(o, "tables.csv", out, res);
        out << csv_comment(c) << '\n';
        engine::write_tables_csv(out, x.tables);
    }
    {
        std::ofstream out;
        open_output(o, "series.csv", out, res);
        out << csv_comment(c) << "\nside,j,exponent,coeff\n";
        for (auto side : {engine::Side::inner, engine::Side::outer})
            for (int j = 1; j <= c.J; ++j) {
                const auto series = engine::mode_series(x.tables, j, side);
                for (const auto &[e, v] : series.terms())
                    out << (side == engine::Side::inner ? "inner" : "outer") << ',' << j << ',' << e.str() << ','
                        << format_double(v) << '\n';
            }
    }
    engine::ConsistencyReport rep;
    if (c.posthoc) {
        rep = engine::posthoc_consistency(x);
        std::ofstream out;
        open_output(o, "posthoc.csv", out, res);
        out << csv_comment(c) << "\ne,c_deviation,B_deviation\n";
        for (std::size_t i = 0; i < x.tables.monoid.size(); ++i)
            out << x.tables.monoid[i].str() << ',' << format_double(rep.c_deviation[i]) << ','
                << format_double(rep.B_deviation[i]) << '\n';
    }
    const double eps_star = engine::estimate_epsilon_star(x.tables.matrices, *c.basis);
    std::ofstream out;
    open_output(o, "expand_report.csv", out, res);
    out << csv_comment(c) << "\nquantity,value\n"
        << "J," << c.J << '\n'
        << "e_max," << c.e_max.str() << '\n'
        << "monoid_size," << x.tables.monoid.size() << '\n'
        << "nonzero_entries," << engine::nonzero_entries(x.tables) << '\n'
        << "matrices," << (x.tables.matrices.analytic ? "analytic" : "numeric") << '\n'
        << "trace_spread_Omega," << format_double(x.tables.matrices.max_deviation_Omega) << '\n'
        << "trace_spread_P," << format_double(x.tables.matrices.max_deviation_P) << '\n'
        << "eps_star_estimate," << format_double(eps_star) << '\n';
    if (c.posthoc)
        out << "posthoc_max_c_deviation," << format_double(rep.max_c) << '\n'
            << "posthoc_max_B_deviation," << format_double(rep.max_B) << '\n';
    if (o.verbose)
        log << "expand: " << x.tables.monoid.size() << " exponents, " << engine::nonzero_entries(x.tables)
            << " nonzero entries, eps* ~ " << eps_star << '\n';
    return res;
}

std::vector<engine::Point> sample_points(const geometry::GeneratingTriple &t, double eps, int n, Region region) {
    const auto [p_lo, p_hi] = t.rho_p.range(t.omega);
    const auto [o_lo, o_hi] = t.rho_omega.range(t.omega);
    (void)p_lo;
    (void)o_hi;
    double lo = 1.05 * eps * p_hi, hi = 0.95 * o_lo;
    if (region == Region::outer) lo = std::max(lo, 2.1 * t.R0 * eps);
    if (region == Region::inner) hi = std::min(hi, 0.45 * t.r0);
    if (!(hi > lo)) throw ValidationError("evaluation region is empty at eps = " + format_double(eps));
    std::vector<engine::Point> pts;
    for (int k = 0; k < n; ++k) {
        const double s = n == 1 ? 0.5 : static_cast<double>(k) / (n - 1);
        pts.push_back({lo * std::pow(hi / lo, s), t.omega * (k + 0.5) / n});
    }
    return pts;
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::vector<double> exact_values(const RunConfig &c, double eps, const std::vector<engine::Point> &pts) {
    if (c.triple.family != geometry::Family::annular_exact) throw ValidationError("exact comparison needs an annulus");
    if (c.rhs.kind != geometry::RhsKind::modal) throw ValidationError("exact comparison needs modal data");
    std::vector<int> modes;
    if (c.rhs.f.active()) modes.push_back(c.rhs.f.mode);
    if (c.rhs.F.active() && (modes.empty() || modes[0] != c.rhs.F.mode)) modes.push_back(c.rhs.F.mode);
    std::vector<double> v(pts.size(), 0.0);
    for (int j : modes) {
        auto ex = solver::exact_mode_oracle(c.triple, eps, j, *c.basis, c.rhs.f, c.rhs.F);
        for (std::size_t i = 0; i < pts.size(); ++i) v[i] += ex(pts[i].r) * c.basis->psi(j, pts[i].theta);
    }
    return v;
}

std::vector<double> field_values(const solver::Field &f, const std::vector<engine::Point> &pts) {
    std::vector<double> v;
    for (const auto &pt : pts) v.push_back(f.value(pt.r, pt.theta));
    return v;
}

}  // namespace

CommandResult cmd_compare(const RunConfig &c0, const CommandOptions &o, std::ostream &log) {
    const RunConfig c = with_threads(c0, o);
    if (c.eps.empty()) throw ConfigurationError("[compare] eps list is empty");
    CommandResult res;
    auto p = c.problem();
    auto x = engine::build_expansion(p, c.rhs, c.e_max, c.J);
    std::shared_ptr<const solver::Problem> fine;
    if (c.compare_mode == CompareMode::direct) {
        auto cfg = c.solver;
        cfg.h_t *= 0.5;
        cfg.n_theta *= 2;
        fine = std::make_shared<const solver::Problem>(c.triple, c.basis, c.cutoffs(), cfg);
    }
    std::vector<double> eps = c.eps;
    std::sort(eps.begin(), eps.end(), std::greater<>());

    struct Row {
        double eps, abs_err, rel_err, indicator, disc;
    };
    const std::vector<std::pair<Region, std::string>> kinds{
        {Region::global, "global"}, {Region::outer, "outer"}, {Region::inner, "inner"}};
    std::vector<std::vector<Row>> rows(kinds.size());
    for (double e : eps) {
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            const auto pts = sample_points(c.triple, e, c.points, kinds[k].first);
            engine::EvalResult ev;
            switch (kinds[k].first) {
                case Region::global: ev = engine::global_eval(x, e, pts); break;
                case Region::outer: ev = engine::outer_eval(x, e, pts); break;
                case Region::inner: ev = engine::inner_eval(x, e, pts); break;
            }
            std::vector<double> ref;
            double disc = std::numeric_limits<double>::quiet_NaN();
            if (c.compare_mode == CompareMode::exact) {
                ref = exact_values(c, e, pts);
            } else {
                ref = field_values(*solver::direct_oracle(*p, e, c.rhs), pts);
                const auto finer = field_values(*solver::direct_oracle(*fine, e, c.rhs), pts);
                disc = 0.0;
                for (std::size_t i = 0; i < pts.size(); ++i) disc = std::max(disc, std::abs(finer[i] - ref[i]));
            }
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                num = std::max(num, std::abs(ev.values[i] - ref[i]));
                den = std::max(den, std::abs(ref[i]));
            }
            rows[k].push_back({e, num, den > 0.0 ? num / den : num, ev.max_indicator(), disc});
        }
        if (o.verbose) log << "compare: eps = " << e << " done\n";
    }

    std::ofstream out;
    open_output(o, "compare.csv", out, res);
    out << csv_comment(c) << "\neps,kind,max_abs_error,rel_error,indicator,disc_estimate,slope\n";
    std::vector<PlotSeries> plot;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        PlotSeries s{kinds[k].second, {}, {}};
        for (std::size_t i = 0; i < rows[k].size(); ++i) {
            const auto &r = rows[k][i];
            double slope = std::numeric_limits<double>::quiet_NaN();
            if (i > 0 && r.abs_err > 0.0 && rows[k][i - 1].abs_err > 0.0)
                slope = std::log(r.abs_err / rows[k][i - 1].abs_err) / std::log(r.eps / rows[k][i - 1].eps);
            out << format_double(r.eps) << ',' << kinds[k].second << ',' << format_double(r.abs_err) << ','
                << format_double(r.rel_err) << ',' << format_double(r.indicator) << ',' << fmt(r.disc) << ','
                << fmt(slope) << '\n';
            s.x.push_back(r.eps);
            s.y.push_back(r.abs_err);
        }
        plot.push_back(std::move(s));
    }
    std::ofstream svg;
    open_output(o, "compare.svg", svg, res);
    write_loglog_svg(svg, "expansion error vs eps (" + c.triple.name + ")", "eps", "max abs error", plot);
    return res;
}

namespace {

void dump_field(const solver::Field &f, solver::GridPtr fallback_grid, const RunConfig &c, const CommandOptions &o,
                const std::string &stem, CommandResult &res) {
    const auto *g = dynamic_cast<const solver::GridField *>(&f);
    std::optional<solver::GridField> sampled;
    if (!g) {
        sampled = solver::sample_field(
            fallback_grid, [&](double r, double th) { return f.value(r, th); }, f.domain(), f.scale());
        g = &*sampled;
    }
    std::ofstream out;
    if (c.oracle_format == DumpFormat::binary) {
        open_output(o, stem + ".lpgf", out, res, true);
        g->write_binary(out);
    } else {
        open_output(o, stem + ".csv", out, res);
        out << csv_comment(c) << '\n';
        g->write_csv(out);
    }
}

}  // namespace

CommandResult cmd_oracle(const RunConfig &c0, const CommandOptions &o, std::ostream &log) {
    const RunConfig c = with_threads(c0, o);
    CommandResult res;
    auto p = c.problem();
    const double eps = c.oracle_eps;
    auto grid_for = [&](solver::LogPolarDomain d, double anchor) {
        return std::make_shared<const solver::LogPolarGrid>(std::move(d), c.solver.h_t, c.solver.n_theta, anchor);
    };
    switch (c.oracle_kind) {
        case OracleKind::direct: {
            auto u = solver::direct_oracle(*p, eps, c.rhs);
            dump_field(*u, grid_for(p->omega_eps_domain(eps), std::log(eps)), c, o, "oracle_direct", res);
            break;
        }
        case OracleKind::limit_omega: {
            auto s = solver::solve_limit_omega(*p, c.rhs);
            dump_field(*s.field, grid_for(p->omega_domain(), 0.0), c, o, "oracle_limit_omega", res);
            break;
        }
        case OracleKind::limit_pattern: {
            auto s = solver::solve_limit_pattern(*p, c.rhs);
            dump_field(*s.field, grid_for(p->pattern_domain(), 0.0), c, o, "oracle_limit_pattern", res);
            break;
        }
        case OracleKind::exact: {
            if (c.triple.family != geometry::Family::annular_exact)
                throw ValidationError("exact oracle needs an annulus");
            if (!(eps >= 0.0)) throw ValidationError("[oracle] eps must be >= 0");
            std::ofstream out;
            open_output(o, "oracle_exact.csv", out, res);
            out << csv_comment(c) << "\nj,r,u\n";
            std::vector<int> modes;
            if (c.rhs.f.active()) modes.push_back(c.rhs.f.mode);
            if (c.rhs.F.active() && std::find(modes.begin(), modes.end(), c.rhs.F.mode) == modes.end())
                modes.push_back(c.rhs.F.mode);
            for (int j : modes) {
                auto ex = solver::exact_mode_oracle(c.triple, eps, j, *c.basis, c.rhs.f, c.rhs.F);
                for (const auto &[r, u] : ex.table) out << j << ',' << format_double(r) << ',' << format_double(u) << '\n';
            }
            break;
        }
    }
    if (o.verbose) log << "oracle: wrote " << res.files.size() << " file(s)\n";
    return res;
}

}  // namespace corner::cli
