#include "corner/solver/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include "corner/error.hpp"
#include "corner/gps/exponent.hpp"

namespace corner::solver {

namespace {

constexpr double kOnBoundary = 1e-11;

std::array<double, 4> lagrange4(double x) {
    return {-(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0, x * (x - 2.0) * (x - 3.0) / 2.0,
            -x * (x - 1.0) * (x - 3.0) / 2.0, x * (x - 1.0) * (x - 2.0) / 6.0};
}

RadialSide reflect_side(const RadialSide &s, double rho, double L) {
    if (s.kind == SideKind::radiating) return RadialSide::open(L - s.t_trunc);
    const double rho2 = rho * rho;
    if (s.curve.is_constant()) return RadialSide::on_curve(geometry::BoundaryCurve::constant(rho2 / (s.scale * *s.curve.constant_value())));
    auto c = s.curve;
    const double sc = s.scale;
    return RadialSide::on_curve(
        geometry::BoundaryCurve([c, sc, rho2](double th) { return rho2 / (sc * c(th)); }, "kelvin(" + c.description() + ")"));
}

// Sine coefficients of an interior row (entries 1..n-1 of the row).
Eigen::VectorXd sine_coefficients(const Eigen::VectorXd &row) {
    const int n = static_cast<int>(row.size()) - 1;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n - 1);
    for (int j = 1; j < n; ++j) {
        double s = 0.0;
        for (int i = 1; i < n; ++i) s += row[i] * std::sin(std::numbers::pi * j * i / n);
        a[j - 1] = 2.0 * s / n;
    }
    return a;
}

}  // namespace

RadialSide RadialSide::on_curve(geometry::BoundaryCurve c, double scale) {
    RadialSide s;
    s.kind = SideKind::curve;
    s.curve = std::move(c);
    s.scale = scale;
    return s;
}

RadialSide RadialSide::open(double t_trunc) {
    RadialSide s;
    s.kind = SideKind::radiating;
    s.t_trunc = t_trunc;
    return s;
}

double RadialSide::t_at(double theta) const { return std::log(scale * curve(theta)); }

double LogPolarDomain::margin(double t, double theta) const {
    double m = std::numeric_limits<double>::infinity();
    if (inner.kind == SideKind::curve) m = std::min(m, t - inner.t_at(theta));
    if (outer.kind == SideKind::curve) m = std::min(m, outer.t_at(theta) - t);
    return m;
}

bool LogPolarDomain::separable() const {
    auto flat = [](const RadialSide &s) { return s.kind == SideKind::radiating || s.curve.is_constant(); };
    return flat(inner) && flat(outer) && !boundary_data;
}

LogPolarGrid::LogPolarGrid(LogPolarDomain domain, double h_t, int n_theta, double anchor)
    : domain_(std::move(domain)), omega_(domain_.omega), h_t_(h_t), n_theta_(n_theta) {
    if (!(h_t > 0.0)) throw ConfigurationError("grid step h_t must be positive");
    if (n_theta < 2) throw ConfigurationError("angular grid needs n_theta >= 2");
    if (!(omega_ > 0.0)) throw ConfigurationError("grid opening angle must be positive");
    inner_open_ = domain_.inner.kind == SideKind::radiating;
    outer_open_ = domain_.outer.kind == SideKind::radiating;

    long k_lo = 0;
    long k_hi = 0;
    if (inner_open_) {
        k_lo = static_cast<long>(std::floor((domain_.inner.t_trunc - anchor) / h_t + 1e-9));
    } else {
        const auto [lo, hi] = domain_.inner.curve.range(omega_);
        (void)hi;
        k_lo = static_cast<long>(std::floor((std::log(domain_.inner.scale * lo) - anchor) / h_t)) - 1;
    }
    if (outer_open_) {
        k_hi = static_cast<long>(std::ceil((domain_.outer.t_trunc - anchor) / h_t - 1e-9));
    } else {
        const auto [lo, hi] = domain_.outer.curve.range(omega_);
        (void)lo;
        k_hi = static_cast<long>(std::ceil((std::log(domain_.outer.scale * hi) - anchor) / h_t)) + 1;
    }
    nt_ = static_cast<int>(k_hi - k_lo);
    if (nt_ < 3) throw ConfigurationError("log-polar grid has fewer than 3 intervals in t");
    t_min_ = anchor + static_cast<double>(k_lo) * h_t;

    kinds_.assign(static_cast<std::size_t>(nt_ + 1) * (n_theta_ + 1), NodeKind::outside);
    for (int k = 0; k <= nt_; ++k) {
        const double t = this->t(k);
        for (int i = 0; i <= n_theta_; ++i) {
            const double th = theta(i);
            const double m = domain_.margin(t, th);
            NodeKind kd;
            const bool edge = i == 0 || i == n_theta_;
            if (!edge && ((inner_open_ && k == 0) || (outer_open_ && k == nt_))) {
                if (!(m > kOnBoundary))
                    throw ConfigurationError("artificial circle intersects the curved boundary");
                kd = k == 0 && inner_open_ ? NodeKind::dtn_plus : NodeKind::dtn_minus;
            } else if (edge) {
                kd = m >= -kOnBoundary ? NodeKind::dirichlet_zero : NodeKind::outside;
            } else if (m > kOnBoundary) {
                kd = NodeKind::interior;
            } else if (m >= -kOnBoundary) {
                kd = NodeKind::dirichlet_zero;
            } else {
                kd = NodeKind::outside;
            }
            kinds_[static_cast<std::size_t>(k) * (n_theta_ + 1) + i] = kd;
        }
    }
    number_unknowns();
}

void LogPolarGrid::number_unknowns() {
    ids_.assign(kinds_.size(), -1);
    n_unknowns_ = 0;
    for (std::size_t p = 0; p < kinds_.size(); ++p) {
        const NodeKind kd = kinds_[p];
        if (kd == NodeKind::interior || kd == NodeKind::dtn_plus || kd == NodeKind::dtn_minus) ids_[p] = n_unknowns_++;
    }
}

LogPolarGrid LogPolarGrid::reflected(double rho) const {
    const double L = 2.0 * std::log(rho);
    LogPolarGrid g;
    g.domain_.omega = omega_;
    g.domain_.inner = reflect_side(domain_.outer, rho, L);
    g.domain_.outer = reflect_side(domain_.inner, rho, L);
    if (domain_.boundary_data) {
        auto bd = domain_.boundary_data;
        g.domain_.boundary_data = [bd, L](double t, double th) { return bd(L - t, th); };
    }
    g.omega_ = omega_;
    g.h_t_ = h_t_;
    g.nt_ = nt_;
    g.n_theta_ = n_theta_;
    g.t_min_ = L - t_max();
    g.inner_open_ = outer_open_;
    g.outer_open_ = inner_open_;
    g.kinds_.resize(kinds_.size());
    for (int k = 0; k <= nt_; ++k)
        for (int i = 0; i <= n_theta_; ++i) {
            NodeKind kd = kind(nt_ - k, i);
            if (kd == NodeKind::dtn_plus)
                kd = NodeKind::dtn_minus;
            else if (kd == NodeKind::dtn_minus)
                kd = NodeKind::dtn_plus;
            g.kinds_[static_cast<std::size_t>(k) * (n_theta_ + 1) + i] = kd;
        }
    g.number_unknowns();
    return g;
}

Eigen::MatrixXd dtn_transfer(int n_theta, double h_t, double h_theta) {
    const int M = n_theta - 1;
    Eigen::MatrixXd S(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) S(i, j) = std::sin(std::numbers::pi * (i + 1) * (j + 1) / n_theta);
    Eigen::VectorXd q(M);
    for (int j = 0; j < M; ++j) {
        const double s = std::sin(std::numbers::pi * (j + 1) / (2.0 * n_theta));
        const double mu = 4.0 * s * s / (h_theta * h_theta);
        const double x = 0.5 * h_t * h_t * mu;
        q[j] = 1.0 + x - std::sqrt(x * (2.0 + x));
    }
    return (2.0 / n_theta) * S * q.asDiagonal() * S;
}

// ---------------------------------------------------------------------------

FdSolver::FdSolver(GridPtr grid, double residual_tol) : grid_(std::move(grid)), tol_(residual_tol) {
    const LogPolarGrid &g = *grid_;
    const int N = g.n_unknowns();
    if (N == 0) throw ConfigurationError("grid has no unknowns");
    const LogPolarDomain &dom = g.domain();
    const double ht = g.h_t();
    const double hth = g.h_theta();
    const int nth = g.n_theta();
    Eigen::MatrixXd T;
    if (g.has_dtn_plus() || g.has_dtn_minus()) T = dtn_transfer(nth, ht, hth);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(N) * 5);
    bc_ = Eigen::VectorXd::Zero(N);

    struct Link {
        double dist;
        int id;
        double data;
    };
    // Neighbor in direction (dk, di) of node (k, i), with a Shortley-Weller cut when it lies outside.
    auto link = [&](int k, int i, int dk, int di) -> Link {
        const int k2 = k + dk;
        const int i2 = i + di;
        const double h = dk != 0 ? ht : hth;
        const NodeKind kd = g.kind(k2, i2);
        if (kd != NodeKind::outside && kd != NodeKind::dirichlet_zero) return {h, g.unknown(k2, i2), 0.0};
        if (kd == NodeKind::dirichlet_zero) return {h, -1, dom.data(g.t(k2), g.theta(i2))};
        const double t0 = g.t(k);
        const double th0 = g.theta(i);
        const double dt = dk * ht;
        const double dth = di * hth;
        double a = 0.0;
        double b = 1.0;
        for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (a + b);
            if (dom.margin(t0 + m * dt, th0 + m * dth) > 0.0)
                a = m;
            else
                b = m;
        }
        const double s = std::max(0.5 * (a + b), 1e-8);
        return {s * h, -1, dom.data(t0 + s * dt, th0 + s * dth)};
    };

    for (int k = 0; k <= g.nt(); ++k)
        for (int i = 1; i < nth; ++i) {
            const int row = g.unknown(k, i);
            if (row < 0) continue;
            const NodeKind kd = g.kind(k, i);
            double diag = 0.0;
            auto add_pair = [&](const Link &lm, const Link &lp) {
                const double dm = lm.dist;
                const double dp = lp.dist;
                const double am = 2.0 / (dm * (dm + dp));
                const double ap = 2.0 / (dp * (dm + dp));
                diag -= 2.0 / (dm * dp);
                for (auto [l, a] : {std::pair{lm, am}, std::pair{lp, ap}}) {
                    if (l.id >= 0)
                        trip.emplace_back(row, l.id, a);
                    else
                        bc_[row] += a * l.data;
                }
            };
            add_pair(link(k, i, 0, -1), link(k, i, 0, 1));
            if (kd == NodeKind::interior) {
                add_pair(link(k, i, -1, 0), link(k, i, 1, 0));
            } else {
                // Ghost row beyond the artificial circle is T times this row.
                const int k_in = kd == NodeKind::dtn_plus ? k + 1 : k - 1;
                const Link in = link(k, i, k_in - k, 0);
                const double a = 1.0 / (ht * ht);
                diag -= 2.0 * a;
                if (in.id >= 0)
                    trip.emplace_back(row, in.id, a);
                else
                    bc_[row] += a * in.data;
                for (int m = 1; m < nth; ++m) {
                    const double w = a * T(i - 1, m - 1);
                    if (w != 0.0) trip.emplace_back(row, g.unknown(k, m), w);
                }
            }
            trip.emplace_back(row, row, diag);
        }

    A_.resize(N, N);
    A_.setFromTriplets(trip.begin(), trip.end());
    A_.makeCompressed();
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(N);
    for (int c = 0; c < A_.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A_, c); it; ++it) rowsum[it.row()] += std::abs(it.value());
    a_norm_ = rowsum.maxCoeff();
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->analyzePattern(A_);
    lu_->factorize(A_);
    if (lu_->info() != Eigen::Success) throw ConfigurationError("finite-difference system is singular");
}

SolveReport FdSolver::solve(const std::function<double(double, double)> &source) const {
    const LogPolarGrid &g = *grid_;
    const int N = g.n_unknowns();
    Eigen::VectorXd b(N);
    for (int k = 0; k <= g.nt(); ++k)
        for (int i = 1; i < g.n_theta(); ++i) {
            const int row = g.unknown(k, i);
            if (row < 0) continue;
            b[row] = (source ? source(g.t(k), g.theta(i)) : 0.0) - bc_[row];
        }
    SolveReport rep;
    Eigen::VectorXd x = lu_->solve(b);
    auto backward_error = [&](const Eigen::VectorXd &r) {
        const double denom = a_norm_ * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
        return denom > 0.0 ? r.lpNorm<Eigen::Infinity>() / denom : 0.0;
    };
    Eigen::VectorXd r = b - A_ * x;
    rep.residual = backward_error(r);
    while (rep.residual > tol_ && rep.refinements < 5) {
        x += lu_->solve(r);
        r = b - A_ * x;
        rep.residual = backward_error(r);
        ++rep.refinements;
    }
    if (!x.allFinite() || rep.residual > tol_)
        throw IterationLimit("finite-difference solve did not reach the residual tolerance", rep.residual);

    rep.values = Eigen::MatrixXd::Zero(g.nt() + 1, g.n_theta() + 1);
    for (int k = 0; k <= g.nt(); ++k)
        for (int i = 0; i <= g.n_theta(); ++i) {
            const int id = g.unknown(k, i);
            if (id >= 0)
                rep.values(k, i) = x[id];
            else if (g.kind(k, i) == NodeKind::dirichlet_zero)
                rep.values(k, i) = g.domain().data(g.t(k), g.theta(i));
        }
    return rep;
}

GridField assemble_and_solve(GridPtr grid, const std::function<double(double, double)> &source, DomainTag domain,
                             ScaleFlag scale, double residual_tol) {
    FdSolver solver(grid, residual_tol);
    auto rep = solver.solve(source);
    return GridField(std::move(grid), std::move(rep.values), domain, scale);
}

GridField sample_field(GridPtr grid, const std::function<double(double, double)> &fn, DomainTag domain,
                       ScaleFlag scale) {
    const auto &g = *grid;
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(g.nt() + 1, g.n_theta() + 1);
    for (int k = 0; k <= g.nt(); ++k)
        for (int i = 0; i <= g.n_theta(); ++i)
            if (g.kind(k, i) != NodeKind::outside) v(k, i) = fn(std::exp(g.t(k)), g.theta(i));
    return GridField(std::move(grid), std::move(v), domain, scale);
}

// ---------------------------------------------------------------------------

GridField::GridField(GridPtr grid, Eigen::MatrixXd values, DomainTag domain, ScaleFlag scale)
    : Field(grid->omega(), domain, scale), grid_(std::move(grid)), values_(std::move(values)) {
    const auto &g = *grid_;
    if (values_.rows() != g.nt() + 1 || values_.cols() != g.n_theta() + 1)
        throw PreconditionError("grid field values do not match the grid dimensions");
    if (!values_.allFinite()) throw PreconditionError("grid field values must be finite");
    if (g.has_dtn_plus()) bottom_coeffs_ = sine_coefficients(values_.row(0).transpose());
    if (g.has_dtn_minus()) top_coeffs_ = sine_coefficients(values_.row(g.nt()).transpose());
}

double GridField::continuation(bool bottom, double t, double theta) const {
    const auto &g = *grid_;
    const Eigen::VectorXd &a = bottom ? bottom_coeffs_ : top_coeffs_;
    const double dist = bottom ? g.t_min() - t : t - g.t_max();
    double s = 0.0;
    for (int j = 1; j <= a.size(); ++j) {
        const double lam = j * std::numbers::pi / g.omega();
        s += a[j - 1] * std::exp(-lam * dist) * std::sin(lam * theta);
    }
    return s;
}

double GridField::column_value(int i, double t) const {
    const auto &g = *grid_;
    const double x = (t - g.t_min()) / g.h_t();
    const int nt = g.nt();
    int k = std::clamp(static_cast<int>(std::floor(x)), 0, nt - 1);
    const int k0 = std::clamp(k - 1, 0, nt - 3);
    bool ok = true;
    for (int m = 0; m < 4; ++m)
        if (g.kind(k0 + m, i) == NodeKind::outside) ok = false;
    if (ok) {
        const auto w = lagrange4(x - k0);
        double s = 0.0;
        for (int m = 0; m < 4; ++m) s += w[m] * values_(k0 + m, i);
        return s;
    }
    const double f = x - k;
    return (1.0 - f) * values_(k, i) + f * values_(k + 1, i);
}

double GridField::value(double r, double theta) const {
    if (!(r > 0.0)) throw OutOfDomain("grid field evaluated at r <= 0");
    const auto &g = *grid_;
    const double t = std::log(r);
    const double slack = 1e-12 * (1.0 + std::abs(t));
    if (theta < -1e-14 || theta > g.omega() + 1e-14) throw OutOfDomain("angle outside the sector");
    theta = std::clamp(theta, 0.0, g.omega());
    if (t < g.t_min() - slack) {
        if (!g.has_dtn_plus()) throw OutOfDomain("point below the grid");
        return continuation(true, t, theta);
    }
    if (t > g.t_max() + slack) {
        if (!g.has_dtn_minus()) throw OutOfDomain("point above the grid");
        return continuation(false, t, theta);
    }
    if (g.domain().margin(t, theta) < -kOnBoundary) throw OutOfDomain("point outside the domain");
    const int nt = g.nt();
    const int nth = g.n_theta();
    const double x = std::clamp((t - g.t_min()) / g.h_t(), 0.0, static_cast<double>(nt));
    const double y = theta / g.h_theta();
    const int k = std::clamp(static_cast<int>(std::floor(x)), 0, nt - 1);
    const int i = std::clamp(static_cast<int>(std::floor(y)), 0, nth - 1);
    if (nth >= 3) {
        const int k0 = std::clamp(k - 1, 0, nt - 3);
        const int i0 = std::clamp(i - 1, 0, nth - 3);
        bool ok = true;
        for (int a = 0; a < 4 && ok; ++a)
            for (int b = 0; b < 4; ++b)
                if (g.kind(k0 + a, i0 + b) == NodeKind::outside) {
                    ok = false;
                    break;
                }
        if (ok) {
            const auto wt = lagrange4(x - k0);
            const auto wth = lagrange4(y - i0);
            double s = 0.0;
            for (int a = 0; a < 4; ++a) {
                double row = 0.0;
                for (int b = 0; b < 4; ++b) row += wth[b] * values_(k0 + a, i0 + b);
                s += wt[a] * row;
            }
            return s;
        }
    }
    const double fx = x - k;
    const double fy = y - i;
    return (1.0 - fx) * ((1.0 - fy) * values_(k, i) + fy * values_(k, i + 1)) +
           fx * ((1.0 - fy) * values_(k + 1, i) + fy * values_(k + 1, i + 1));
}

bool GridField::covers_radius(double rho) const {
    if (!(rho > 0.0)) return false;
    const auto &g = *grid_;
    const double t = std::log(rho);
    const double slack = 1e-12 * (1.0 + std::abs(t));
    if (t < g.t_min() - slack) return g.has_dtn_plus();
    if (t > g.t_max() + slack) return g.has_dtn_minus();
    const double x = std::clamp((t - g.t_min()) / g.h_t(), 0.0, static_cast<double>(g.nt()));
    const int k = std::clamp(static_cast<int>(std::floor(x)), 0, g.nt() - 1);
    for (int i = 1; i < g.n_theta(); ++i)
        if (g.kind(k, i) == NodeKind::outside || g.kind(k + 1, i) == NodeKind::outside) return false;
    return true;
}

std::vector<double> GridField::angular_nodes() const { return uniform_angles(grid_->omega(), grid_->n_theta()); }

Eigen::VectorXd GridField::circle_values(double rho) const {
    if (!covers_radius(rho)) throw OutOfDomain("circle of radius " + gps::format_double(rho) + " leaves the grid field");
    const auto &g = *grid_;
    const double t = std::log(rho);
    const int nth = g.n_theta();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(nth + 1);
    const bool below = t < g.t_min();
    const bool above = t > g.t_max();
    for (int i = 1; i < nth; ++i) {
        if (below)
            v[i] = continuation(true, t, g.theta(i));
        else if (above)
            v[i] = continuation(false, t, g.theta(i));
        else
            v[i] = column_value(i, std::clamp(t, g.t_min(), g.t_max()));
    }
    return v;
}

GridField GridField::reflected(double rho) const {
    auto g = std::make_shared<const LogPolarGrid>(grid_->reflected(rho));
    Eigen::MatrixXd v = values_.colwise().reverse();
    DomainTag d = domain();
    if (d == DomainTag::omega)
        d = DomainTag::pattern;
    else if (d == DomainTag::pattern)
        d = DomainTag::omega;
    const ScaleFlag s = scale() == ScaleFlag::slow ? ScaleFlag::rapid : ScaleFlag::slow;
    return GridField(std::move(g), std::move(v), d, s);
}

void GridField::write_csv(std::ostream &out) const {
    const auto &g = *grid_;
    out << "t,theta,value\n";
    for (int k = 0; k <= g.nt(); ++k)
        for (int i = 0; i <= g.n_theta(); ++i) {
            if (g.kind(k, i) == NodeKind::outside) continue;
            out << gps::format_double(g.t(k)) << ',' << gps::format_double(g.theta(i)) << ','
                << gps::format_double(values_(k, i)) << '\n';
        }
}

namespace {

template <class T>
void put(std::ostream &out, T v) {
    out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <class T>
T get(std::istream &in) {
    T v{};
    in.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (!in) throw ValidationError("truncated grid dump");
    return v;
}

}  // namespace

void GridField::write_binary(std::ostream &out) const {
    const auto &g = *grid_;
    out.write("LPGF", 4);
    put<std::uint32_t>(out, 1);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(domain()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(scale()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.nt() + 1));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n_theta() + 1));
    put<double>(out, g.t_min());
    put<double>(out, g.h_t());
    put<double>(out, g.omega());
    for (int k = 0; k <= g.nt(); ++k)
        for (int i = 0; i <= g.n_theta(); ++i) put<double>(out, values_(k, i));
    for (int k = 0; k <= g.nt(); ++k)
        for (int i = 0; i <= g.n_theta(); ++i) put<std::uint8_t>(out, static_cast<std::uint8_t>(g.kind(k, i)));
}

BinaryGrid read_binary_grid(std::istream &in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "LPGF", 4) != 0) throw ValidationError("not a grid dump (bad magic)");
    if (get<std::uint32_t>(in) != 1) throw ValidationError("unsupported grid dump version");
    BinaryGrid b;
    b.domain = static_cast<DomainTag>(get<std::uint32_t>(in));
    b.scale = static_cast<ScaleFlag>(get<std::uint32_t>(in));
    const auto rows = get<std::uint32_t>(in);
    const auto cols = get<std::uint32_t>(in);
    b.t_min = get<double>(in);
    b.h_t = get<double>(in);
    b.omega = get<double>(in);
    b.values.resize(rows, cols);
    for (std::uint32_t k = 0; k < rows; ++k)
        for (std::uint32_t i = 0; i < cols; ++i) b.values(k, i) = get<double>(in);
    b.kinds.resize(static_cast<std::size_t>(rows) * cols);
    for (auto &kd : b.kinds) kd = static_cast<NodeKind>(get<std::uint8_t>(in));
    return b;
}

}  // namespace corner::solver
