#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "corner/cli/commands.hpp"
#include "corner/cli/config.hpp"
#include "corner/engine/expansion.hpp"
#include "corner/engine/fixed_point.hpp"
#include "corner/engine/tables.hpp"
#include "corner/gps/monoid.hpp"
#include "corner/gps/series.hpp"
#include "corner/spectral/basis.hpp"
#include "corner/spectral/kelvin.hpp"

namespace gps = corner::gps;
namespace geo = corner::geometry;
namespace sp = corner::spectral;
namespace solver = corner::solver;
namespace engine = corner::engine;
namespace cli = corner::cli;

using gps::Exponent;
using gps::GenSeries;
using gps::Rational;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

int threads() { return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u)); }

std::shared_ptr<const solver::Problem> annulus_problem(Rational w, double r0, double R0, int J) {
    solver::SolverConfig cfg;
    cfg.threads = threads();
    cfg.n_theta = std::max(cfg.n_theta, 8 * J);
    auto t = geo::annulus_exact(w, r0, R0);
    auto basis = std::make_shared<const sp::SpectralBasis>(sp::sector_eigendata_exact(w, J, cfg.n_theta));
    return std::make_shared<const solver::Problem>(t, basis, geo::Cutoffs(r0, R0, 1.0), cfg);
}

geo::RhsSpec mode_rhs(const geo::GeneratingTriple &t, double famp, double Famp) {
    auto rhs = geo::default_rhs(t);
    rhs.f.mode = rhs.F.mode = 1;
    rhs.f.amplitude = famp;
    rhs.F.amplitude = Famp;
    return rhs;
}

std::vector<double> exact_at(const solver::Problem &p, const geo::RhsSpec &rhs, double eps,
                             const std::vector<engine::Point> &pts) {
    auto ex = solver::exact_mode_oracle(p.triple(), eps, 1, p.basis(), rhs.f, rhs.F);
    std::vector<double> v;
    for (const auto &pt : pts) v.push_back(ex(pt.r) * p.basis().psi(1, pt.theta));
    return v;
}

double max_abs_diff(const std::vector<double> &a, const std::vector<double> &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double rel_error(const std::vector<double> &a, const std::vector<double> &ref) {
    double den = 0.0;
    for (double v : ref) den = std::max(den, std::abs(v));
    return max_abs_diff(a, ref) / den;
}

// ---------------------------------------------------------------------------

GenSeries<double> random_series(std::mt19937_64 &rng, const gps::ExponentMonoid &m, bool with_constant,
                                double max_exponent) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::bernoulli_distribution keep(0.6);
    GenSeries<double> s;
    for (std::size_t i = with_constant ? 0 : 1; i < m.size(); ++i)
        if (m[i].value() <= max_exponent + 1e-12 && keep(rng)) s.add_term(m[i], coeff(rng));
    return s;
}

double max_coeff(const GenSeries<double> &s) {
    double m = 0.0;
    for (const auto &[e, c] : s.terms()) m = std::max(m, std::abs(c));
    return m;
}

Outcome criterion1() {
    std::mt19937_64 rng(20261015);
    std::uniform_int_distribution<int> ngen(1, 3), den(2, 5), half_emax(4, 8);
    std::uniform_real_distribution<double> real_gen(0.25, 1.5), xi_dist(0.0, 1.0);
    std::bernoulli_distribution exact_gen(0.5);

    double worst_neumann = 0.0, worst_ring = 0.0, worst_eval = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Exponent> gens;
        const int n = ngen(rng);
        for (int k = 0; k < n; ++k) {
            if (exact_gen(rng)) {
                const int q = den(rng);
                std::uniform_int_distribution<int> pn(std::max(1, q / 4), 3 * q / 2);
                gens.emplace_back(Rational(pn(rng), q));
            } else {
                gens.emplace_back(real_gen(rng));
            }
        }
        const Exponent e_max(Rational(half_emax(rng), 2));
        const auto m = gps::monoid_generate(gens, e_max);

        auto f = random_series(rng, m, false, e_max.value());
        if (f.is_zero()) f.add_term(m[1], 0.5);
        const double g_min = gps::series_valuation(f)->value();
        const auto inv = gps::series_neumann_inverse(f, e_max);
        const auto one_plus_f = gps::series_add(f, GenSeries<double>::monomial(Exponent::zero(), 1.0));
        const auto one = GenSeries<double>::monomial(Exponent::zero(), 1.0);
        const double bound = std::pow(1.0 + gps::series_norm(f, 1.0), e_max.value() / g_min);
        for (const auto &prod : {gps::series_mul(one_plus_f, inv, e_max), gps::series_mul(inv, one_plus_f, e_max)}) {
            const auto res = gps::series_sub(prod, one);
            for (const auto &[e, c] : res.terms())
                if (e.value() <= e_max.value() - g_min + 1e-12)
                    worst_neumann = std::max(worst_neumann, std::abs(c) / bound);
        }

        const auto a = random_series(rng, m, true, e_max.value());
        const auto b = random_series(rng, m, true, e_max.value());
        const auto c = random_series(rng, m, true, e_max.value());
        const double na = gps::series_norm(a, 1.0), nb = gps::series_norm(b, 1.0), nc = gps::series_norm(c, 1.0);
        auto rel = [](const GenSeries<double> &x, const GenSeries<double> &y, double scale) {
            return scale > 0.0 ? max_coeff(gps::series_sub(x, y)) / scale : max_coeff(gps::series_sub(x, y));
        };
        const auto assoc_l = gps::series_mul(gps::series_mul(a, b, e_max), c, e_max);
        const auto assoc_r = gps::series_mul(a, gps::series_mul(b, c, e_max), e_max);
        worst_ring = std::max(worst_ring, rel(assoc_l, assoc_r, na * nb * nc));
        const auto dist_l = gps::series_mul(a, gps::series_add(b, c), e_max);
        const auto dist_r = gps::series_add(gps::series_mul(a, b, e_max), gps::series_mul(a, c, e_max));
        worst_ring = std::max(worst_ring, rel(dist_l, dist_r, na * (nb + nc)));
        const auto ab = gps::series_add(a, b), ba = gps::series_add(b, a);
        if (ab.size() != ba.size()) worst_ring = std::max(worst_ring, 1.0);
        worst_ring = std::max(worst_ring, rel(ab, ba, na + nb));
        worst_ring = std::max(worst_ring, rel(gps::series_mul(a, b, e_max), gps::series_mul(b, a, e_max), na * nb));

        // Supports up to e_max/2 keep the product untruncated.
        const double half = 0.5 * e_max.value();
        const auto p = random_series(rng, m, true, half);
        const auto q = random_series(rng, m, true, half);
        const double xi = xi_dist(rng);
        const double lhs = gps::series_eval(gps::series_mul(p, q, e_max), xi);
        const double rhs = gps::series_eval(p, xi) * gps::series_eval(q, xi);
        const double scale = gps::series_norm(p, xi) * gps::series_norm(q, xi);
        worst_eval = std::max(worst_eval, scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs));
    }
    Outcome o;
    o.pass = worst_neumann <= 1e-12 && worst_ring <= 1e-12 && worst_eval <= 1e-12;
    o.detail = "200 trials; neumann residual/bound " + num(worst_neumann) + ", ring " + num(worst_ring) +
               ", eval homomorphism " + num(worst_eval);
    return o;
}

Outcome criterion2() {
    double worst = 0.0;
    std::string where;
    int runs = 0;
    for (auto w : {Rational(1), Rational(3, 2)}) {
        const double lam = 1.0 / w.value();
        // 24 lambda_1 keeps the truncation far below the tolerance for R0/r0 = 2 at eps = 0.1.
        const Exponent e_max(Rational(24 * w.den, w.num));
        for (double r0 : {1.0, 2.0})
            for (double R0 : {1.0, 2.0}) {
                auto probe = annulus_problem(w, r0, R0, 64);
                const int J = engine::required_modes(probe->basis(), e_max.value());
                auto p = annulus_problem(w, r0, R0, J);
                (void)lam;
                for (auto [fa, Fa] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}}) {
                    const auto rhs = mode_rhs(p->triple(), fa, Fa);
                    const auto x = engine::build_expansion(p, rhs, e_max, J);
                    for (double eps : {0.02, 0.05, 0.1}) {
                        using R = cli::Region;
                        for (auto region : {R::outer, R::inner, R::global}) {
                            const auto pts = cli::sample_points(p->triple(), eps, 20, region);
                            const auto ev = region == R::outer   ? engine::outer_eval(x, eps, pts)
                                            : region == R::inner ? engine::inner_eval(x, eps, pts)
                                                                 : engine::global_eval(x, eps, pts);
                            const double err = rel_error(ev.values, exact_at(*p, rhs, eps, pts));
                            ++runs;
                            if (err > worst) {
                                worst = err;
                                std::ostringstream s;
                                s << "omega=" << w.str() << "pi r0=" << r0 << " R0=" << R0 << (fa != 0 ? " f" : " F")
                                  << " eps=" << eps << ' '
                                  << (region == R::outer ? "outer" : region == R::inner ? "inner" : "global");
                                where = s.str();
                            }
                        }
                    }
                }
            }
    }
    return {worst <= 1e-8, std::to_string(runs) + " evaluations; max relative error " + num(worst) + " (" + where + ")"};
}

Outcome criterion3() {
    auto p = annulus_problem(Rational(1), 1.0, 1.0, 5);
    const auto rhs = mode_rhs(p->triple(), 1.0, 0.0);
    const auto x = engine::build_expansion(p, rhs, Exponent(Rational(5)), 5);
    const auto &t = x.tables;
    const bool identity = t.matrices.S_Omega == Eigen::MatrixXd::Identity(5, 5) &&
                          t.matrices.S_P == Eigen::MatrixXd::Identity(5, 5);
    const double c = t.c[0][0];
    double dev = 0.0;
    for (int m = 0; m <= 2; ++m) {
        const auto even = t.monoid.index_of(Exponent(Rational(2 * m)));
        const auto odd = t.monoid.index_of(Exponent(Rational(2 * m + 1)));
        if (!even || !odd) return {false, "monoid is missing an integer exponent"};
        dev = std::max(dev, std::abs(t.c[*even][0] - c));
        dev = std::max(dev, std::abs(t.B[*odd][0] + c));
    }
    return {identity && c != 0.0 && dev <= 1e-13, "c = " + num(c) + ", max deviation " + num(dev) +
                                                       (identity ? ", S matrices are the identity" : ", S matrices differ from the identity")};
}

Outcome criterion4() {
    // Slit sector: lambda_j = j/2, f and F both active so every monoid level carries a nonzero term.
    const Rational w(2);
    auto probe = annulus_problem(w, 1.0, 1.0, 16);
    std::vector<double> eps;
    for (int k = 0; k <= 10; ++k) eps.push_back(std::pow(10.0, -3.0 + 0.2 * k));
    std::vector<engine::Point> pts;
    for (double r : {0.25, 0.35, 0.45})
        for (double th : {0.3 * kPi, kPi, 1.7 * kPi}) pts.push_back({r, th});

    Outcome o{true, ""};
    for (auto e_N : {Rational(1), Rational(2)}) {
        // Only mode 1 is active and lambda_1^- = -1/2, so truncating the outer series at total
        // exponent e_N keeps exactly the table entries up to e_N - 1/2.
        const Exponent table_max(Rational(2 * e_N.num - e_N.den, 2 * e_N.den));
        const int J = engine::required_modes(probe->basis(), table_max.value());
        auto p = annulus_problem(w, 1.0, 1.0, J);
        const auto rhs = mode_rhs(p->triple(), 1.0, 1.0);
        const auto x = engine::build_expansion(p, rhs, table_max, J);
        const auto full = engine::expansion_monoid(p->basis(), J, Exponent(Rational(e_N.num + e_N.den, e_N.den)));
        const auto n = full.index_of(Exponent(e_N));
        const double next = full[*n + 1].value();
        std::vector<double> err;
        for (double e : eps) err.push_back(max_abs_diff(engine::outer_eval(x, e, pts).values, exact_at(*p, rhs, e, pts)));
        const double slope = cli::loglog_slope(eps, err);
        const bool ok = std::abs(slope - next) <= 0.1 * next;
        o.pass = o.pass && ok;
        o.detail += (o.detail.empty() ? "" : "; ") + std::string("e_N=") + e_N.str() + ": slope " + num(slope) +
                    " vs e_N+1=" + num(next) + " (errors " + num(err.back()) + " .. " + num(err.front()) + ")";
    }
    return o;
}

struct RoundedRun {
    std::shared_ptr<const solver::Problem> problem;
    geo::RhsSpec rhs;
    engine::Expansion x;
};

RoundedRun rounded_corner_run() {
    std::istringstream in(R"([geometry]
preset = rounded_corner
omega = 3/2 pi
[expansion]
e_max = 2
[rhs]
kind = gridded
f_amplitude = 1
F_amplitude = 1
)");
    auto cfg = cli::parse_config(in);
    cfg.solver.threads = threads();
    auto p = cfg.problem();
    // Three monoid levels above zero.
    const auto m = engine::expansion_monoid(p->basis(), cfg.J, Exponent(Rational(4)));
    const Exponent e_max = m[3];
    const int J = engine::required_modes(p->basis(), e_max.value());
    if (J > cfg.J) throw corner::PreconditionError("basis too small for three monoid levels");
    return {p, cfg.rhs, engine::build_expansion(p, cfg.rhs, e_max, J)};
}

Outcome criterion5(const RoundedRun &run) {
    const double eps = 0.05;
    const auto &p = *run.problem;
    auto cfg = p.config();
    cfg.h_t *= 0.5;
    cfg.n_theta *= 2;
    const solver::Problem fine(p.triple(), p.basis_ptr(), p.cutoffs(), cfg);
    const auto pts = cli::sample_points(p.triple(), eps, 20, cli::Region::global);
    auto sample = [&](const solver::Field &f) {
        std::vector<double> v;
        for (const auto &pt : pts) v.push_back(f.value(pt.r, pt.theta));
        return v;
    };
    const auto coarse = sample(*solver::direct_oracle(p, eps, run.rhs));
    const auto finer = sample(*solver::direct_oracle(fine, eps, run.rhs));
    const auto series = engine::global_eval(run.x, eps, pts);
    const double disc = max_abs_diff(coarse, finer);
    const double err = max_abs_diff(series.values, finer);
    const double err_coarse = max_abs_diff(series.values, coarse);
    return {disc > 0.0 && err <= 5.0 * disc,
            "e_max=" + run.x.tables.e_max().str() + ", |series - oracle(h/2)| " + num(err) + ", |series - oracle(h)| " +
                num(err_coarse) + ", discretization estimate " + num(disc) + ", indicator " + num(series.max_indicator())};
}

Outcome criterion6() {
    const auto b = sp::sector_eigendata(1.5 * kPi, 4, 96);
    solver::LogPolarDomain d;
    d.omega = b.omega();
    d.inner = solver::RadialSide::open(std::log(0.2));
    d.outer = solver::RadialSide::open(std::log(0.9));
    auto g = std::make_shared<const solver::LogPolarGrid>(d, 0.01, 96, 0.0);
    double worst = 0.0, off = 0.0;
    for (int j = 1; j <= 4; ++j) {
        const auto hp = solver::sample_field(
            g, [&](double r, double th) { return sp::h_eval(b, j, sp::Sign::plus, r, th); },
            solver::DomainTag::omega, solver::ScaleFlag::slow);
        const auto k = sp::kelvin_transform(hp, 1.0);
        const auto &kg = k.grid();
        for (int r = 0; r <= kg.nt(); ++r)
            for (int i = 0; i <= kg.n_theta(); ++i) {
                const double R = std::exp(kg.t(r)), th = kg.theta(i);
                worst = std::max(worst, std::abs(k.values()(r, i) - sp::h_eval(b, j, sp::Sign::minus, R, th)));
            }
        for (double R : {1.17, 2.3, 4.1})
            for (double th : {0.37, 2.0, 4.4})
                off = std::max(off, std::abs(k.value(R, th) - sp::h_eval(b, j, sp::Sign::minus, R, th)));
    }
    return {worst <= 1e-10, "max deviation on the reflected grid " + num(worst) + " (off-node interpolation " + num(off) + ")"};
}

Outcome criterion7(const RoundedRun &run) {
    auto p = annulus_problem(Rational(3, 2), 1.0, 1.0, 6);
    const auto rhs = mode_rhs(p->triple(), 1.0, 1.0);
    const auto ann = engine::build_expansion(p, rhs, Exponent(Rational(10, 3)), 6);
    auto check = [](const engine::Expansion &x) {
        double scale = 0.0;
        for (std::size_t i = 0; i < x.tables.monoid.size(); ++i)
            scale = std::max({scale, x.tables.c[i].cwiseAbs().maxCoeff(), x.tables.B[i].cwiseAbs().maxCoeff()});
        const auto rep = engine::posthoc_consistency(x);
        return std::pair{std::max(rep.max_c, rep.max_B), scale};
    };
    const auto [da, sa] = check(ann);
    const auto [dr, sr] = check(run.x);
    const double tol = 1e-10;
    return {da <= tol * sa && dr <= tol * sr, "annulus deviation " + num(da) + " (scale " + num(sa) +
                                                  "), rounded corner deviation " + num(dr) + " (scale " + num(sr) + ")"};
}

Outcome criterion8() {
    bool ok = true;
    int checks = 0;
    for (double w : {0.5, 0.5 * kPi, kPi, 1.5 * kPi, 2.0 * kPi}) {
        const int J = static_cast<int>(std::ceil(50.0 * w / kPi)) + 5;
        const auto b = sp::sector_eigendata(w, J, std::max(512, 8 * J));
        const double d = sp::counting_constant(b);
        for (double lam = 0.01; lam <= 50.0; lam += 0.01) {
            ok = ok && sp::counting_function(b, lam) <= d * lam;
            ++checks;
        }
        for (int j = 1; j <= J && b.mode(j).lambda_plus <= 50.0; ++j) {
            ok = ok && sp::counting_function(b, b.mode(j).lambda_plus) <= d * b.mode(j).lambda_plus;
            ++checks;
        }
    }
    return {ok, std::to_string(checks) + " checks over five sector angles"};
}

Outcome criterion9() {
    const double eps = 0.1;
    auto p = annulus_problem(Rational(1), 1.0, 1.0, 4);
    const auto rhs = mode_rhs(p->triple(), 1.0, 0.0);
    engine::FixedPointOptions opt;
    opt.J = 1;
    const auto fp = engine::coupled_fixed_point(*p, eps, rhs, opt);
    const auto x = engine::build_expansion(p, rhs, Exponent(Rational(3)), 4);
    const auto pts = cli::sample_points(p->triple(), eps, 20, cli::Region::global);
    const auto g = engine::global_eval(x, eps, pts);
    const auto a = engine::assemble_fixed_point(*p, fp, eps, pts);
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) worst = std::max(worst, std::abs(a[i] - g.values[i]) / (2.0 * g.indicator[i]));
    const double expected = std::pow(eps, 2.0 * p->basis().mode(1).lambda_plus);
    const double ratio_dev = std::abs(fp.contraction_ratio - expected) / expected;
    return {fp.converged && worst <= 1.0 && ratio_dev <= 0.2,
            "max |fixed point - global| / (2 indicator) " + num(worst) + ", contraction ratio " +
                num(fp.contraction_ratio) + " vs eps^(2 lambda_1) " + num(expected) + " after " +
                std::to_string(fp.iterations) + " iterations"};
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    int failed = 0;
    auto run = [&](int n, double limit_s, const std::function<Outcome()> &fn) {
        const auto t0 = clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        const bool in_time = limit_s <= 0.0 || secs <= limit_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("criterion %d: %s  %s  [%.2f s%s]\n", n, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                    limit_s > 0.0 ? (in_time ? (", limit " + num(limit_s) + " s").c_str()
                                             : (", exceeds limit " + num(limit_s) + " s").c_str())
                                  : "");
        std::fflush(stdout);
    };

    run(1, 10.0, criterion1);
    run(2, 120.0, criterion2);
    run(3, 1.0, criterion3);
    run(4, 300.0, criterion4);

    std::optional<RoundedRun> rounded;
    const auto t0 = clock::now();
    std::string rounded_error;
    try {
        rounded = rounded_corner_run();
    } catch (const std::exception &e) {
        rounded_error = e.what();
    }
    const double setup = std::chrono::duration<double>(clock::now() - t0).count();
    run(5, 600.0 - setup, [&]() -> Outcome {
        if (!rounded) return {false, "rounded-corner expansion failed: " + rounded_error};
        return criterion5(*rounded);
    });
    run(6, 5.0, criterion6);
    run(7, 0.0, [&]() -> Outcome {
        if (!rounded) return {false, "rounded-corner expansion failed: " + rounded_error};
        return criterion7(*rounded);
    });
    run(8, 0.0, criterion8);
    run(9, 0.0, criterion9);

    std::printf("%d of 9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}
