#include "corner/solver/problems.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "corner/error.hpp"
#include "corner/parallel.hpp"
#include "corner/solver/modal_field.hpp"
#include "corner/solver/radial.hpp"

namespace corner::solver {

using geometry::CutoffKind;
using spectral::Sign;

namespace {

constexpr double kLn2 = std::numbers::ln2;

int cache_key(DomainTag d) { return d == DomainTag::omega ? 0 : 1; }

ScaleFlag scale_of(DomainTag d) { return d == DomainTag::pattern ? ScaleFlag::rapid : ScaleFlag::slow; }

// amplitude * e^{2(t - shift)} g(e^{t - shift}) on the log image of the support.
Source component_source(const geometry::RhsSpec &rhs, const geometry::RhsComponent &c,
                        const spectral::SpectralBasis &basis, double shift) {
    Source s;
    if (!c.active()) return s;
    const auto g = c.profile;
    const double amp = c.amplitude;
    const double lo = std::log(g.a) + shift;
    const double hi = std::log(g.b) + shift;
    auto radial = [g, amp, shift](double t) {
        const double u = t - shift;
        return amp * std::exp(2.0 * u) * g(std::exp(u));
    };
    if (rhs.kind == geometry::RhsKind::modal) {
        s.modal.push_back({c.mode, SourcePiece{radial, lo, hi, {}}});
    } else {
        const double omega = basis.omega();
        s.gridded = [radial, lo, hi, omega](double t, double th) {
            if (t <= lo || t >= hi) return 0.0;
            const double x = th / omega;
            return radial(t) * 16.0 * x * x * (1.0 - x) * (1.0 - x);
        };
    }
    return s;
}

}  // namespace

Problem::Problem(geometry::GeneratingTriple triple, std::shared_ptr<const spectral::SpectralBasis> basis,
                 geometry::Cutoffs cutoffs, SolverConfig config)
    : triple_(std::move(triple)), basis_(std::move(basis)), cutoffs_(cutoffs), config_(config) {
    if (!basis_ || !basis_->is_sector()) throw ValidationError("solver needs plane-sector eigendata");
    if (std::abs(basis_->omega() - triple_.omega) > 1e-12 * triple_.omega)
        throw ValidationError("eigendata opening angle differs from the geometry");
    if (std::abs(cutoffs_.r0() - triple_.r0) > 1e-14 * triple_.r0 || std::abs(cutoffs_.R0() - triple_.R0) > 1e-14 * triple_.R0)
        throw ValidationError("cutoff radii differ from the geometry");
    if (config_.n_theta <= basis_->J()) throw ConfigurationError("n_theta must exceed the number of modes J");
}

std::vector<double> Problem::omega_extraction_radii() const {
    const double w = cutoffs_.width();
    const double top = std::min(triple_.r0 * std::exp2(-w), 0.5 * triple_.r0) * std::exp2(-w);
    return {top, top * std::exp2(-0.25), top * std::exp2(-0.5)};
}

std::vector<double> Problem::pattern_extraction_radii() const {
    const double w = cutoffs_.width();
    const double bot = std::max(triple_.R0 * std::exp2(w), 2.0 * triple_.R0) * std::exp2(w);
    return {bot, bot * std::exp2(0.25), bot * std::exp2(0.5)};
}

LogPolarDomain Problem::omega_domain() const {
    LogPolarDomain d;
    d.omega = triple_.omega;
    d.inner = RadialSide::open(std::log(omega_extraction_radii().back()) - 0.5 * kLn2);
    d.outer = RadialSide::on_curve(triple_.rho_omega);
    return d;
}

LogPolarDomain Problem::pattern_domain() const {
    LogPolarDomain d;
    d.omega = triple_.omega;
    d.inner = RadialSide::on_curve(triple_.rho_p);
    d.outer = RadialSide::open(std::log(pattern_extraction_radii().back()) + 0.5 * kLn2);
    return d;
}

LogPolarDomain Problem::omega_eps_domain(double eps) const {
    LogPolarDomain d;
    d.omega = triple_.omega;
    d.inner = RadialSide::on_curve(triple_.rho_p, eps);
    d.outer = RadialSide::on_curve(triple_.rho_omega);
    return d;
}

Source Problem::source_f(const geometry::RhsSpec &rhs) const { return component_source(rhs, rhs.f, *basis_, 0.0); }

Source Problem::source_F(const geometry::RhsSpec &rhs) const { return component_source(rhs, rhs.F, *basis_, 0.0); }

Source Problem::source_eps(const geometry::RhsSpec &rhs, double eps) const {
    Source s = component_source(rhs, rhs.f, *basis_, 0.0);
    s.append(component_source(rhs, rhs.F, *basis_, std::log(eps)));
    return s;
}

Source Problem::corrector_source(int j, Sign sign) const {
    if (j < 1 || j > basis_->J()) throw PreconditionError("corrector mode outside 1..J");
    const CutoffKind which = sign == Sign::plus ? CutoffKind::Phi : CutoffKind::phi;
    const double lam = basis_->lambda(j, sign);
    const auto [a, b] = cutoffs_.transition(which);
    const geometry::Cutoffs c = cutoffs_;
    Source s;
    s.modal.push_back({j, SourcePiece{[c, which, lam](double t) {
                                          const auto d = c.log_derivs(which, t);
                                          return (d.dtt + 2.0 * lam * d.dt) * std::exp(lam * t);
                                      },
                                      std::log(a), std::log(b), {}}});
    return s;
}

bool Problem::separable(DomainTag domain) const {
    if (config_.force_fd) return false;
    switch (domain) {
        case DomainTag::omega:
            return triple_.rho_omega.is_constant();
        case DomainTag::pattern:
            return triple_.rho_p.is_constant();
        case DomainTag::omega_eps:
            return triple_.rho_omega.is_constant() && triple_.rho_p.is_constant();
    }
    return false;
}

FieldPtr Problem::solve(DomainTag domain, const Source &source, double eps) const {
    if (domain == DomainTag::omega_eps && !(eps > 0.0)) throw PreconditionError("Omega_eps solve needs eps > 0");
    if (source.is_modal() && separable(domain)) return solve_modal(domain, source, eps);
    return solve_fd(domain, source, eps);
}

FieldPtr Problem::solve_modal(DomainTag domain, const Source &source, double eps) const {
    double t_a = 0.0;
    double t_b = 0.0;
    EndCondition left = EndCondition::dirichlet;
    EndCondition right = EndCondition::dirichlet;
    double lo_src = std::numeric_limits<double>::infinity();
    double hi_src = -std::numeric_limits<double>::infinity();
    for (const auto &m : source.modal) {
        lo_src = std::min(lo_src, m.piece.lo);
        hi_src = std::max(hi_src, m.piece.hi);
    }
    switch (domain) {
        case DomainTag::omega:
            t_a = std::min(omega_domain().inner.t_trunc, lo_src);
            t_b = std::log(*triple_.rho_omega.constant_value());
            left = EndCondition::radiating;
            break;
        case DomainTag::pattern:
            t_a = std::log(*triple_.rho_p.constant_value());
            t_b = std::max(pattern_domain().outer.t_trunc, hi_src);
            right = EndCondition::radiating;
            break;
        case DomainTag::omega_eps:
            t_a = std::log(eps * *triple_.rho_p.constant_value());
            t_b = std::log(*triple_.rho_omega.constant_value());
            break;
    }
    std::map<int, RadialProfile> modes;
    for (const auto &m : source.modal) {
        if (modes.count(m.mode)) continue;
        RadialProblem rp;
        rp.lambda = basis_->mode(m.mode).lambda_plus;
        rp.t_a = t_a;
        rp.t_b = t_b;
        rp.left = left;
        rp.right = right;
        rp.sources = source.pieces_for(m.mode);
        rp.max_cell = config_.modal_max_cell;
        modes.emplace(m.mode, solve_radial(rp));
    }
    return std::make_shared<ModalField>(basis_, std::move(modes), domain, scale_of(domain), t_a, t_b,
                                        left == EndCondition::radiating, right == EndCondition::radiating);
}

std::shared_ptr<const FdSolver> Problem::fd_solver(DomainTag domain, double eps) const {
    auto build = [&]() {
        LogPolarDomain d;
        double anchor = 0.0;
        if (domain == DomainTag::omega) {
            d = omega_domain();
        } else if (domain == DomainTag::pattern) {
            d = pattern_domain();
        } else {
            d = omega_eps_domain(eps);
            anchor = std::log(eps);
        }
        auto grid = std::make_shared<const LogPolarGrid>(std::move(d), config_.h_t, config_.n_theta, anchor);
        return std::make_shared<const FdSolver>(grid, config_.residual_tol);
    };
    if (domain == DomainTag::omega_eps) return build();
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = fd_cache_.find(cache_key(domain));
        if (it != fd_cache_.end()) return it->second;
    }
    auto s = build();
    std::lock_guard<std::mutex> lock(cache_mutex_);
    return fd_cache_.emplace(cache_key(domain), s).first->second;
}

FieldPtr Problem::solve_fd(DomainTag domain, const Source &source, double eps) const {
    auto solver = fd_solver(domain, eps);
    const auto &basis = *basis_;
    auto rep = solver->solve([&](double t, double th) { return source.value(t, th, basis); });
    return std::make_shared<GridField>(solver->grid(), std::move(rep.values), domain, scale_of(domain));
}

// ---------------------------------------------------------------------------

LimitSolution solve_limit_omega(const Problem &p, const geometry::RhsSpec &rhs) {
    geometry::validate_rhs(rhs, p.triple(), p.basis().J());
    LimitSolution s;
    s.field = p.solve(DomainTag::omega, p.source_f(rhs));
    s.trace = spectral::averaged_trace(*s.field, p.omega_extraction_radii(), Sign::plus, p.basis());
    return s;
}

LimitSolution solve_limit_pattern(const Problem &p, const geometry::RhsSpec &rhs) {
    geometry::validate_rhs(rhs, p.triple(), p.basis().J());
    LimitSolution s;
    s.field = p.solve(DomainTag::pattern, p.source_F(rhs));
    s.trace = spectral::averaged_trace(*s.field, p.pattern_extraction_radii(), Sign::minus, p.basis());
    return s;
}

FieldPtr compute_corrector(const Problem &p, int j, Sign sign) {
    return p.solve(sign == Sign::plus ? DomainTag::pattern : DomainTag::omega, p.corrector_source(j, sign));
}

Correctors compute_correctors(const Problem &p, int J) {
    if (J < 1 || J > p.basis().J()) throw PreconditionError("corrector count outside 1..J");
    Correctors Y;
    Y.plus.resize(J);
    Y.minus.resize(J);
    parallel_for(2 * J, p.config().threads, [&](int task) {
        const int j = task % J + 1;
        if (task < J)
            Y.plus[j - 1] = compute_corrector(p, j, Sign::plus);
        else
            Y.minus[j - 1] = compute_corrector(p, j, Sign::minus);
    });
    return Y;
}

InteractionMatrices interaction_matrices(const Problem &p, const Correctors &Y) {
    const int J = static_cast<int>(Y.plus.size());
    InteractionMatrices m;
    m.S_Omega = Eigen::MatrixXd::Zero(J, J);
    m.S_P = Eigen::MatrixXd::Zero(J, J);
    const auto ro = p.omega_extraction_radii();
    const auto rp = p.pattern_extraction_radii();
    for (int j = 0; j < J; ++j) {
        auto to = spectral::averaged_trace(*Y.minus[j], ro, Sign::plus, p.basis());
        auto tp = spectral::averaged_trace(*Y.plus[j], rp, Sign::minus, p.basis());
        m.S_Omega.col(j) = to.coefficients.head(J);
        m.S_P.col(j) = tp.coefficients.head(J);
        m.max_deviation_Omega = std::max(m.max_deviation_Omega, to.max_deviation);
        m.max_deviation_P = std::max(m.max_deviation_P, tp.max_deviation);
    }
    return m;
}

InteractionMatrices interaction_matrices(const Problem &p, int J) {
    if (J < 1 || J > p.basis().J()) throw PreconditionError("matrix size outside 1..J");
    const auto &t = p.triple();
    if (t.family == geometry::Family::annular_exact && !p.config().numeric_matrices) {
        InteractionMatrices m;
        m.analytic = true;
        m.S_Omega = Eigen::MatrixXd::Zero(J, J);
        m.S_P = Eigen::MatrixXd::Zero(J, J);
        for (int j = 1; j <= J; ++j) {
            const auto &md = p.basis().mode(j);
            m.S_Omega(j - 1, j - 1) = std::pow(t.r0, md.lambda_minus - md.lambda_plus);
            m.S_P(j - 1, j - 1) = std::pow(t.R0, md.lambda_plus - md.lambda_minus);
        }
        return m;
    }
    return interaction_matrices(p, compute_correctors(p, J));
}

FieldPtr direct_oracle(const Problem &p, double eps, const geometry::RhsSpec &rhs) {
    if (!(eps > 0.0) || eps > p.triple().eps_max() * (1.0 + 1e-12))
        throw PreconditionError("direct_oracle needs 0 < eps <= eps0/4");
    geometry::validate_rhs(rhs, p.triple(), p.basis().J());
    return p.solve(DomainTag::omega_eps, p.source_eps(rhs, eps), eps);
}

// ---------------------------------------------------------------------------

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

double integrate(const std::function<double(double)> &f, double a, double b) {
    if (!(b > a)) return 0.0;
    return GK::integrate(f, a, b, 6, 1e-13);
}

constexpr int kPanels = 64;

}  // namespace

std::pair<double, double> ExactModeSolution::coefficients(double r) const {
    double I1 = 0.0;
    double I2 = 0.0;
    const double L = lambda;
    for (std::size_t m = 0; m < sources.size(); ++m) {
        const auto &s = sources[m];
        const auto &pn = panels[m];
        if (r <= s.lo) continue;
        if (r >= s.hi) {
            I1 += pn.I1.back();
            I2 += pn.I2.back();
            continue;
        }
        const auto k = static_cast<std::size_t>(std::upper_bound(pn.edges.begin(), pn.edges.end(), r) - pn.edges.begin()) - 1;
        I1 += pn.I1[k] + integrate([&](double x) { return std::pow(x, 1.0 - L) * s.fn(x); }, pn.edges[k], r);
        I2 += pn.I2[k] + integrate([&](double x) { return std::pow(x, 1.0 + L) * s.fn(x); }, pn.edges[k], r);
    }
    return {alpha + I1 / (2.0 * L), beta - I2 / (2.0 * L)};
}

double ExactModeSolution::operator()(double r) const {
    if (r < r_a * (1.0 - 1e-14) || r > r_b * (1.0 + 1e-14)) throw OutOfDomain("radius outside the oracle interval");
    if (r <= 0.0) return 0.0;
    const auto [A, B] = coefficients(r);
    return A * std::pow(r, lambda) + B * std::pow(r, -lambda);
}

ExactModeSolution solve_exact_mode(const ExactModeProblem &p, int table_size) {
    if (!(p.lambda > 0.0)) throw PreconditionError("exact mode oracle needs lambda > 0");
    if (!(p.r_a >= 0.0) || !(p.r_b > p.r_a)) throw PreconditionError("exact mode oracle needs 0 <= r_a < r_b");
    ExactModeSolution s;
    s.lambda = p.lambda;
    s.r_a = p.r_a;
    s.r_b = p.r_b;
    for (auto src : p.sources) {
        src.lo = std::max(src.lo, p.r_a);
        src.hi = std::min(src.hi, p.r_b);
        if (!(src.hi > src.lo)) continue;
        ExactModeSolution::Panels pn;
        pn.I1.push_back(0.0);
        pn.I2.push_back(0.0);
        for (int k = 0; k <= kPanels; ++k) pn.edges.push_back(k == kPanels ? src.hi : src.lo + (src.hi - src.lo) * k / kPanels);
        for (int k = 0; k < kPanels; ++k) {
            const double a = pn.edges[k];
            const double b = pn.edges[k + 1];
            pn.I1.push_back(pn.I1.back() + integrate([&](double x) { return std::pow(x, 1.0 - p.lambda) * src.fn(x); }, a, b));
            pn.I2.push_back(pn.I2.back() + integrate([&](double x) { return std::pow(x, 1.0 + p.lambda) * src.fn(x); }, a, b));
        }
        s.sources.push_back(src);
        s.panels.push_back(std::move(pn));
    }
    const double L = p.lambda;
    s.alpha = 0.0;
    s.beta = 0.0;
    const auto [A_end, B_end] = s.coefficients(std::isfinite(p.r_b) ? p.r_b : std::numeric_limits<double>::max());
    const double I1b = A_end;   // alpha = 0 here
    const double I2b = -B_end;  // beta = 0 here
    if (std::isfinite(p.r_b)) {
        const double q = std::pow(p.r_a / p.r_b, 2.0 * L);
        s.alpha = (std::pow(p.r_b, -2.0 * L) * I2b - I1b) / (1.0 - q);
    } else {
        s.alpha = -I1b;
    }
    s.beta = -s.alpha * std::pow(p.r_a, 2.0 * L);

    std::vector<double> cuts = {p.r_a, p.r_b};
    for (const auto &src : s.sources) {
        cuts.push_back(src.lo);
        cuts.push_back(src.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        if (!(hi > lo)) continue;
        bool free = true;
        for (const auto &src : s.sources)
            if (src.hi > lo && src.lo < hi) free = false;
        if (!free) continue;
        const double mid = std::isfinite(hi) ? (lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi) : 2.0 * lo + 1.0;
        const auto [A, B] = s.coefficients(mid);
        s.homogeneous.push_back({lo, hi, A, B});
    }

    if (table_size >= 2) {
        const double a = p.r_a > 0.0 ? p.r_a : (std::isfinite(p.r_b) ? 1e-3 * p.r_b : 1e-3);
        const double b = std::isfinite(p.r_b) ? p.r_b : 1e3 * std::max(a, 1.0);
        for (int i = 0; i < table_size; ++i) {
            const double r = a * std::pow(b / a, static_cast<double>(i) / (table_size - 1));
            s.table.emplace_back(r, s(r));
        }
    }
    return s;
}

ExactModeSolution exact_mode_oracle(const geometry::GeneratingTriple &t, double eps, int j,
                                    const spectral::SpectralBasis &basis, const geometry::RhsComponent &f,
                                    const geometry::RhsComponent &F) {
    if (t.family != geometry::Family::annular_exact) throw PreconditionError("exact_mode_oracle needs an annular_exact triple");
    if (basis.n() != 2) throw PreconditionError("exact_mode_oracle is implemented for plane sectors");
    if (eps < 0.0) throw PreconditionError("exact_mode_oracle needs eps >= 0");
    ExactModeProblem p;
    p.lambda = basis.mode(j).lambda_plus;
    p.r_a = eps * t.R0;
    p.r_b = t.r0;
    if (f.active() && f.mode == j) {
        const auto g = f.profile;
        const double amp = f.amplitude;
        p.sources.push_back({[g, amp](double r) { return amp * g(r); }, g.a, g.b});
    }
    if (eps > 0.0 && F.active() && F.mode == j) {
        const auto G = F.profile;
        const double amp = F.amplitude / (eps * eps);
        p.sources.push_back({[G, amp, eps](double r) { return amp * G(r / eps); }, eps * G.a, eps * G.b});
    }
    return solve_exact_mode(p);
}

}  // namespace corner::solver
