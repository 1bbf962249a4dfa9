#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "corner/solver/grid.hpp"
#include "corner/solver/radial.hpp"
#include "doctest.h"

using namespace corner::solver;

TEST_CASE("radial solver reproduces closed form with constant source") {
    const double L = 1.7;
    RadialProblem p;
    p.lambda = L;
    p.t_a = 0.0;
    p.t_b = 1.0;
    p.sources.push_back({[](double) { return 1.0; }, 0.0, 1.0, {}});
    const auto prof = solve_radial(p);
    for (double t : {0.0, 0.013, 0.25, 0.5, 0.777, 1.0}) {
        const double exact = (std::cosh(L * (t - 0.5)) / std::cosh(L / 2) - 1.0) / (L * L);
        CHECK(prof(t) == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("radial solver radiating ends with compact source") {
    // s = 1 on [0,1], decay at both infinities; y = (1/(2L)) int -e^{-L|t-tau|} dtau
    const double L = 2.3;
    RadialProblem p;
    p.lambda = L;
    p.t_a = -0.5;
    p.t_b = 1.75;
    p.left = EndCondition::radiating;
    p.right = EndCondition::radiating;
    p.sources.push_back({[](double) { return 1.0; }, 0.0, 1.0, {}});
    const auto prof = solve_radial(p);
    auto exact = [&](double t) {
        double I = 0.0;  // int_0^1 e^{-L|t-s|} ds
        if (t <= 0.0)
            I = (std::exp(L * t) - std::exp(L * (t - 1.0))) / L;
        else if (t >= 1.0)
            I = (std::exp(-L * (t - 1.0)) - std::exp(-L * t)) / L;
        else
            I = (2.0 - std::exp(-L * t) - std::exp(-L * (1.0 - t))) / L;
        return -I / (2.0 * L);
    };
    for (double t : {-3.0, -0.5, 0.0, 0.31, 1.0, 1.5, 1.75, 4.0})
        CHECK(prof(t) == doctest::Approx(exact(t)).epsilon(1e-12));
}

TEST_CASE("radial solver nonzero Dirichlet data without source") {
    const double L = 0.9;
    RadialProblem p;
    p.lambda = L;
    p.t_a = 0.0;
    p.t_b = 2.0;
    p.left_value = 1.0;
    p.right_value = -0.5;
    const auto prof = solve_radial(p);
    for (double t : {0.0, 0.4, 1.3, 2.0}) {
        const double exact = (std::sinh(L * (2.0 - t)) - 0.5 * std::sinh(L * t)) / std::sinh(2.0 * L);
        CHECK(prof(t) == doctest::Approx(exact).epsilon(1e-13));
    }
}


namespace {

// Max nodal error over the nodes of the coarsest grid, for grids refined by 2^level.
double fd_error(int level, const std::function<double(double, double)> &exact,
                const std::function<double(double, double)> &source, const LogPolarDomain &dom_in) {
    LogPolarDomain dom = dom_in;
    dom.boundary_data = exact;
    const double h = 0.1 / (1 << level);
    const int nth = 12 << level;
    auto grid = std::make_shared<const LogPolarGrid>(dom, h, nth, 0.0);
    auto field = assemble_and_solve(grid, source, DomainTag::omega, ScaleFlag::slow);
    double err = 0.0;
    const int step = 1 << level;
    for (int k = 0; k <= grid->nt(); ++k) {
        const double t = grid->t(k);
        if (std::abs(std::remainder(t, 0.1)) > 1e-9) continue;
        for (int i = 0; i <= nth; i += step) {
            if (grid->kind(k, i) != NodeKind::interior && grid->kind(k, i) != NodeKind::dtn_plus) continue;
            err = std::max(err, std::abs(field.values()(k, i) - exact(t, grid->theta(i))));
        }
    }
    return err;
}

}  // namespace

TEST_CASE("fd solve with zero data is zero") {
    LogPolarDomain dom;
    dom.omega = std::numbers::pi;
    dom.inner = RadialSide::open(std::log(0.1));
    dom.outer = RadialSide::on_curve(corner::geometry::BoundaryCurve::constant(1.0));
    auto grid = std::make_shared<const LogPolarGrid>(dom, 0.05, 16, 0.0);
    auto f = assemble_and_solve(grid, nullptr, DomainTag::omega, ScaleFlag::slow);
    CHECK(f.values().lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("fd manufactured harmonic with curved boundary converges at second order") {
    const double omega = 1.5 * std::numbers::pi;
    const double lam = std::numbers::pi / omega;
    LogPolarDomain dom;
    dom.omega = omega;
    dom.inner = RadialSide::open(std::log(0.1));
    dom.outer = RadialSide::on_curve(
        corner::geometry::BoundaryCurve([](double th) { return 1.0 + 0.2 * std::sin(2.0 * th); }, "wavy"));
    auto exact = [lam](double t, double th) { return std::exp(lam * t) * std::sin(lam * th); };
    std::vector<double> errs;
    for (int level = 0; level < 4; ++level) errs.push_back(fd_error(level, exact, nullptr, dom));
    for (std::size_t m = 1; m < errs.size(); ++m) {
        const double order = std::log2(errs[m - 1] / errs[m]);
        MESSAGE("level " << m << " error " << errs[m] << " order " << order);
        CHECK(order >= 1.9);
        CHECK(order <= 2.1);
    }
}

TEST_CASE("fd manufactured bump recovers the bump at second order") {
    const double omega = std::numbers::pi;
    LogPolarDomain dom;
    dom.omega = omega;
    dom.inner = RadialSide::on_curve(
        corner::geometry::BoundaryCurve([](double th) { return 0.3 * (1.0 + 0.3 * std::sin(th)); }, "inner"));
    dom.outer = RadialSide::on_curve(corner::geometry::BoundaryCurve::constant(1.0));
    const double tc = std::log(0.55);
    auto exact = [tc](double t, double th) { return std::exp(-(t - tc) * (t - tc) / 0.08) * std::sin(2.0 * th); };
    auto source = [tc](double t, double th) {
        const double d = t - tc;
        const double g = std::exp(-d * d / 0.08);
        const double gtt = g * (d * d / 0.0016 - 1.0 / 0.04);
        return (gtt - 4.0 * g) * std::sin(2.0 * th);
    };
    std::vector<double> errs;
    for (int level = 0; level < 4; ++level) errs.push_back(fd_error(level, exact, source, dom));
    for (std::size_t m = 1; m < errs.size(); ++m) {
        const double order = std::log2(errs[m - 1] / errs[m]);
        MESSAGE("level " << m << " error " << errs[m] << " order " << order);
        CHECK(order >= 1.9);
        CHECK(order <= 2.1);
    }
}

#include "corner/error.hpp"
#include "corner/geometry/cutoff.hpp"
#include "corner/geometry/rhs.hpp"
#include "corner/solver/problems.hpp"
#include "corner/spectral/basis.hpp"

namespace {

using corner::gps::Rational;
using corner::spectral::Sign;
namespace geo = corner::geometry;

Problem make_annulus(Rational omega_over_pi, double r0, double R0, int J, SolverConfig cfg = {}) {
    auto t = geo::annulus_exact(omega_over_pi, r0, R0);
    auto basis = std::make_shared<const corner::spectral::SpectralBasis>(
        corner::spectral::sector_eigendata_exact(omega_over_pi, J, cfg.n_theta));
    return Problem(t, basis, geo::Cutoffs(r0, R0), cfg);
}

geo::RhsSpec mode_rhs(const geo::GeneratingTriple &t, int fmode, double famp, int Fmode, double Famp) {
    auto rhs = geo::default_rhs(t);
    rhs.f.mode = fmode;
    rhs.f.amplitude = famp;
    rhs.F.mode = Fmode;
    rhs.F.amplitude = Famp;
    return rhs;
}

}  // namespace

TEST_CASE("limit problem on Omega matches the radial oracle") {
    auto p = make_annulus(Rational{1, 1}, 1.0, 1.0, 4);
    auto rhs = mode_rhs(p.triple(), 1, 1.0, 1, 0.0);
    auto lim = solve_limit_omega(p, rhs);
    auto ex = exact_mode_oracle(p.triple(), 0.0, 1, p.basis(), rhs.f, rhs.F);
    REQUIRE(!ex.homogeneous.empty());
    const double c1 = ex.homogeneous.front().A;
    CHECK(lim.trace.coefficients[0] == doctest::Approx(c1).epsilon(1e-10));
    CHECK(std::abs(lim.trace.coefficients[1]) <= 1e-10);
    CHECK(lim.trace.max_deviation <= 1e-12);
    for (double r : {0.2, 0.55, 0.7, 0.93}) {
        const double th = 1.1;
        CHECK(lim.field->value(r, th) == doctest::Approx(ex(r) * p.basis().psi(1, th)).epsilon(1e-10));
    }
}

TEST_CASE("limit problem on P matches the radial oracle") {
    auto p = make_annulus(Rational{3, 2}, 1.0, 2.0, 4);
    auto rhs = mode_rhs(p.triple(), 1, 0.0, 2, 1.0);
    auto lim = solve_limit_pattern(p, rhs);
    ExactModeProblem ep;
    ep.lambda = p.basis().mode(2).lambda_plus;
    ep.r_a = 2.0;
    ep.r_b = std::numeric_limits<double>::infinity();
    ep.sources.push_back({[g = rhs.F.profile](double r) { return g(r); }, rhs.F.profile.a, rhs.F.profile.b});
    auto ex = solve_exact_mode(ep, 0);
    CHECK(lim.trace.coefficients[1] == doctest::Approx(ex.homogeneous.back().B).epsilon(1e-10));
    CHECK(std::abs(lim.trace.coefficients[0]) <= 1e-10);
}

TEST_CASE("modal traces of unexcited high modes vanish") {
    SolverConfig cfg;
    cfg.n_theta = 192;
    auto p = make_annulus(Rational{1, 1}, 2.0, 1.0, 24, cfg);
    auto rhs = mode_rhs(p.triple(), 1, 0.0, 1, 1.0);
    auto lim = solve_limit_pattern(p, rhs);
    CHECK(lim.trace.coefficients[0] != 0.0);
    CHECK(lim.trace.coefficients.tail(23).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero data gives zero limit solutions") {
    auto p = make_annulus(Rational{1, 1}, 1.0, 1.0, 2);
    auto rhs = geo::default_rhs(p.triple());
    auto a = solve_limit_omega(p, rhs);
    auto b = solve_limit_pattern(p, rhs);
    CHECK(a.trace.coefficients.cwiseAbs().maxCoeff() == 0.0);
    CHECK(b.trace.coefficients.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("annulus corrector Y+ equals R0^(2 lambda) h- beyond 2R0") {
    auto p = make_annulus(Rational{3, 2}, 1.0, 1.5, 3);
    for (int j = 1; j <= 3; ++j) {
        auto Y = compute_corrector(p, j, Sign::plus);
        const auto &md = p.basis().mode(j);
        for (double R : {3.2, 4.0, 7.5}) {
            const double th = 0.7;
            const double expect = std::pow(1.5, md.lambda_plus - md.lambda_minus) *
                                  corner::spectral::h_eval(p.basis(), j, Sign::minus, R, th);
            CHECK(Y->value(R, th) == doctest::Approx(expect).epsilon(1e-10));
        }
        // Dirichlet condition on the hole boundary.
        CHECK(std::abs(Y->value(1.5, 0.7)) <= 1e-14);
    }
}

TEST_CASE("numeric interaction matrices agree with the analytic annulus values") {
    SolverConfig cfg;
    cfg.numeric_matrices = true;
    auto p = make_annulus(Rational{1, 1}, 2.0, 1.0, 3, cfg);
    auto num = interaction_matrices(p, 3);
    cfg.numeric_matrices = false;
    auto q = make_annulus(Rational{1, 1}, 2.0, 1.0, 3, cfg);
    auto ana = interaction_matrices(q, 3);
    CHECK(ana.analytic);
    CHECK(ana.S_Omega(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(ana.S_P(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK((num.S_Omega - ana.S_Omega).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((num.S_P - ana.S_P).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("unit annulus interaction matrices are the identity") {
    auto p = make_annulus(Rational{1, 1}, 1.0, 1.0, 4);
    auto m = interaction_matrices(p, 4);
    CHECK((m.S_Omega - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((m.S_P - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("direct oracle matches the radial oracle on the annulus") {
    auto p = make_annulus(Rational{1, 1}, 1.0, 1.0, 2);
    auto rhs = mode_rhs(p.triple(), 1, 1.0, 1, 0.7);
    for (double eps : {0.05, 0.2}) {
        auto u = direct_oracle(p, eps, rhs);
        auto ex = exact_mode_oracle(p.triple(), eps, 1, p.basis(), rhs.f, rhs.F);
        for (double r : {1.3 * eps, 1.7 * eps, 0.3, 0.6, 0.9}) {
            const double th = 2.0;
            CHECK(u->value(r, th) == doctest::Approx(ex(r) * p.basis().psi(1, th)).epsilon(1e-10));
        }
        CHECK(std::abs(u->value(eps, 0.4)) <= 1e-14);
        CHECK(std::abs(u->value(1.0, 0.4)) <= 1e-14);
    }
    CHECK_THROWS_AS(direct_oracle(p, 0.3, rhs), corner::PreconditionError);
}

TEST_CASE("exact mode oracle satisfies the radial ODE") {
    auto t = geo::annulus_exact(Rational{1, 1}, 1.0, 1.0);
    auto basis = corner::spectral::sector_eigendata_exact(Rational{1, 1}, 2, 32);
    auto rhs = mode_rhs(t, 1, 1.0, 1, 0.0);
    auto ex = exact_mode_oracle(t, 0.1, 1, basis, rhs.f, rhs.F);
    const double h = 1e-3;
    double worst = 0.0;
    for (double r : {0.2, 0.55, 0.62, 0.75, 0.9}) {
        // Sixth-order central differences.
        auto u = [&](double x) { return ex(x); };
        const double d1 = (-u(r - 3 * h) + 9 * u(r - 2 * h) - 45 * u(r - h) + 45 * u(r + h) - 9 * u(r + 2 * h) +
                           u(r + 3 * h)) / (60 * h);
        const double d2 = (2 * u(r - 3 * h) - 27 * u(r - 2 * h) + 270 * u(r - h) - 490 * u(r) + 270 * u(r + h) -
                           27 * u(r + 2 * h) + 2 * u(r + 3 * h)) / (180 * h * h);
        const double res = d2 + d1 / r - u(r) / (r * r) - rhs.f.profile(r);
        worst = std::max(worst, std::abs(res));
    }
    CHECK(worst <= 1e-7);
    // Homogeneous part near the hole is A (r - eps^2 / r).
    const auto &first = ex.homogeneous.front();
    CHECK(first.B == doctest::Approx(-first.A * 0.01).epsilon(1e-13));
}

TEST_CASE("fd path: mode decoupling and DtN placement independence") {
    SolverConfig cfg;
    cfg.force_fd = true;
    cfg.h_t = 0.05;
    cfg.n_theta = 32;
    auto p = make_annulus(Rational{1, 1}, 1.0, 1.0, 4, cfg);
    auto rhs = mode_rhs(p.triple(), 1, 1.0, 1, 0.0);
    auto lim = solve_limit_omega(p, rhs);
    CHECK(std::abs(lim.trace.coefficients[1]) <= 1e-10);
    CHECK(std::abs(lim.trace.coefficients[2]) <= 1e-10);

    // Same discrete problem with the artificial circle moved 20 rows further in.
    auto dom = p.omega_domain();
    auto src = p.source_f(rhs);
    const auto &basis = p.basis();
    auto run = [&](double t_trunc) {
        auto d = dom;
        d.inner = RadialSide::open(t_trunc);
        auto g = std::make_shared<const LogPolarGrid>(d, cfg.h_t, cfg.n_theta, 0.0);
        auto f = assemble_and_solve(g, [&](double t, double th) { return src.value(t, th, basis); }, DomainTag::omega,
                                    ScaleFlag::slow);
        return corner::spectral::averaged_trace(f, p.omega_extraction_radii(), Sign::plus, basis).coefficients;
    };
    const auto a = run(dom.inner.t_trunc);
    const auto b = run(dom.inner.t_trunc - 20 * cfg.h_t);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((a - lim.trace.coefficients).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("fd pattern solve: doubling the truncation radius keeps B_1") {
    SolverConfig cfg;
    cfg.force_fd = true;
    cfg.h_t = 0.05;
    cfg.n_theta = 32;
    auto p = make_annulus(Rational{1, 1}, 1.0, 1.0, 2, cfg);
    auto rhs = mode_rhs(p.triple(), 1, 0.0, 1, 1.0);
    auto dom = p.pattern_domain();
    auto src = p.source_F(rhs);
    const auto &basis = p.basis();
    auto run = [&](double t_trunc) {
        auto d = dom;
        d.outer = RadialSide::open(t_trunc);
        auto g = std::make_shared<const LogPolarGrid>(d, cfg.h_t, cfg.n_theta, 0.0);
        auto f = assemble_and_solve(g, [&](double t, double th) { return src.value(t, th, basis); },
                                    DomainTag::pattern, ScaleFlag::rapid);
        return corner::spectral::averaged_trace(f, p.pattern_extraction_radii(), Sign::minus, basis).coefficients[0];
    };
    const double t1 = dom.outer.t_trunc;
    CHECK(std::abs(run(t1) - run(t1 + std::log(2.0))) <= 1e-10);
}

TEST_CASE("fd and modal limit solutions agree to discretization accuracy") {
    SolverConfig cfg;
    cfg.h_t = 0.025;
    cfg.n_theta = 64;
    auto p = make_annulus(Rational{3, 2}, 1.0, 1.0, 3, cfg);
    cfg.force_fd = true;
    auto q = make_annulus(Rational{3, 2}, 1.0, 1.0, 3, cfg);
    auto rhs = mode_rhs(p.triple(), 1, 1.0, 1, 0.0);
    const double exact = solve_limit_omega(p, rhs).trace.coefficients[0];
    const double fd = solve_limit_omega(q, rhs).trace.coefficients[0];
    CHECK(std::abs(fd - exact) <= 1e-3 * std::abs(exact));
}

TEST_CASE("grid field binary dump round trip and Kelvin reflection") {
    LogPolarDomain dom;
    dom.omega = std::numbers::pi;
    dom.inner = RadialSide::open(std::log(0.1));
    dom.outer = RadialSide::on_curve(geo::BoundaryCurve::constant(1.0));
    dom.boundary_data = [](double t, double th) { return std::exp(t) * std::sin(th); };
    auto g = std::make_shared<const LogPolarGrid>(dom, 0.05, 16, 0.0);
    auto f = assemble_and_solve(g, nullptr, DomainTag::omega, ScaleFlag::slow);
    std::stringstream ss;
    f.write_binary(ss);
    auto b = read_binary_grid(ss);
    CHECK(b.values == f.values());
    CHECK(b.t_min == g->t_min());
    CHECK(b.kinds.size() == static_cast<std::size_t>((g->nt() + 1) * 17));
    auto k = f.reflected(1.0);
    CHECK(k.domain() == DomainTag::pattern);
    CHECK(k.grid().has_dtn_minus());
    CHECK(k.value(1.0 / 0.37, 1.0) == doctest::Approx(f.value(0.37, 1.0)).epsilon(1e-13));
}
