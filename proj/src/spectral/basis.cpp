#include "corner/spectral/basis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "corner/error.hpp"

namespace corner::spectral {

namespace {

void check_sector_args(double omega, int J, int n_theta) {
    if (!(omega > 0.0) || omega > 2.0 * std::numbers::pi * (1.0 + 1e-15))
        throw ValidationError("opening angle omega out of range (0, 2pi]: " + std::to_string(omega));
    if (J < 1) throw PreconditionError("mode count J must be >= 1");
    if (n_theta < 8 * J) throw PreconditionError("angular grid needs Ntheta >= 8J");
}

Mode make_mode(double lam) { return {lam * lam, lam, -lam}; }

std::vector<std::vector<double>> read_rows(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open eigendata file " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
            } catch (const std::exception &) {
                numeric = false;
                break;
            }
        }
        if (numeric && !row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

double SpectralBasis::omega() const {
    if (!omega_) throw PreconditionError("basis has no sector opening angle");
    return *omega_;
}

const Mode &SpectralBasis::mode(int j) const {
    if (j < 1 || j > J()) throw PreconditionError("mode index out of range: " + std::to_string(j));
    return modes_[static_cast<std::size_t>(j - 1)];
}

double SpectralBasis::psi(int j, double theta) const {
    if (j < 1 || j > J()) throw PreconditionError("mode index out of range: " + std::to_string(j));
    if (analytic_) {
        const double w = *omega_;
        if (theta < -1e-12 || theta > w + 1e-12) throw OutOfDomain("angle outside the sector");
        return std::sqrt(2.0 / w) * std::sin(j * std::numbers::pi * theta / w);
    }
    const Eigen::Index n = nodes_.size();
    if (theta < nodes_[0] - 1e-12 || theta > nodes_[n - 1] + 1e-12) throw OutOfDomain("angle outside node range");
    const double *b = nodes_.data();
    Eigen::Index k = std::upper_bound(b, b + n, theta) - b - 1;
    Eigen::Index s = std::clamp<Eigen::Index>(k - 1, 0, std::max<Eigen::Index>(n - 4, 0));
    Eigen::Index m = std::min<Eigen::Index>(4, n);
    double v = 0.0;
    for (Eigen::Index a = s; a < s + m; ++a) {
        double l = 1.0;
        for (Eigen::Index c = s; c < s + m; ++c)
            if (c != a) l *= (theta - nodes_[c]) / (nodes_[a] - nodes_[c]);
        v += l * psi_(a, j - 1);
    }
    return v;
}

gps::Exponent SpectralBasis::lambda_plus_exponent(int j) const {
    if (n_ == 2 && omega_over_pi_) {
        return gps::Exponent(gps::Rational(static_cast<std::int64_t>(j) * omega_over_pi_->den, omega_over_pi_->num));
    }
    return gps::Exponent(mode(j).lambda_plus);
}

gps::Exponent SpectralBasis::minus_lambda_minus_exponent(int j) const {
    if (n_ == 2) return lambda_plus_exponent(j);
    return gps::Exponent(-mode(j).lambda_minus);
}

SpectralBasis sector_eigendata(double omega, int J, int n_theta) {
    check_sector_args(omega, J, n_theta);
    SpectralBasis b;
    b.n_ = 2;
    b.omega_ = omega;
    b.analytic_ = true;
    for (int j = 1; j <= J; ++j) b.modes_.push_back(make_mode(j * std::numbers::pi / omega));
    b.nodes_.resize(n_theta + 1);
    b.weights_.resize(n_theta + 1);
    b.psi_.resize(n_theta + 1, J);
    const double h = omega / n_theta;
    for (int i = 0; i <= n_theta; ++i) {
        b.nodes_[i] = (i == n_theta) ? omega : i * h;
        b.weights_[i] = (i == 0 || i == n_theta) ? 0.5 * h : h;
        for (int j = 1; j <= J; ++j)
            b.psi_(i, j - 1) = (i == 0 || i == n_theta) ? 0.0 : std::sqrt(2.0 / omega) * std::sin(j * std::numbers::pi * i / n_theta);
    }
    return b;
}

SpectralBasis sector_eigendata_exact(const gps::Rational &omega_over_pi, int J, int n_theta) {
    if (omega_over_pi.num <= 0) throw ValidationError("opening angle omega out of range (0, 2pi]");
    SpectralBasis b = sector_eigendata(omega_over_pi.value() * std::numbers::pi, J, n_theta);
    b.omega_over_pi_ = omega_over_pi;
    for (int j = 1; j <= J; ++j) {
        double lam = static_cast<double>(j) * static_cast<double>(omega_over_pi.den) / static_cast<double>(omega_over_pi.num);
        b.modes_[static_cast<std::size_t>(j - 1)] = make_mode(lam);
    }
    return b;
}

SpectralBasis external_eigendata(int n, const std::vector<double> &mu, const Eigen::VectorXd &nodes,
                                 const Eigen::VectorXd &weights, const Eigen::MatrixXd &psi,
                                 std::optional<double> omega, double *renormalized_by) {
    if (n < 2) throw ValidationError("dimension n must be >= 2");
    if (mu.empty()) throw ValidationError("eigendata has no modes");
    if (psi.cols() != static_cast<Eigen::Index>(mu.size()) || psi.rows() != nodes.size() || weights.size() != nodes.size())
        throw ValidationError("eigendata sample matrix has inconsistent dimensions");
    for (Eigen::Index i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1])) throw ValidationError("eigendata nodes must be strictly increasing");
    for (std::size_t j = 1; j < mu.size(); ++j)
        if (mu[j] < mu[j - 1]) throw ValidationError("eigenvalues must be non-decreasing");

    SpectralBasis b;
    b.n_ = n;
    b.omega_ = omega;
    for (double m : mu) {
        auto [lp, lm] = lambda_pm(n, m);
        b.modes_.push_back({m, lp, lm});
    }
    b.nodes_ = nodes;
    b.weights_ = weights;
    Eigen::MatrixXd gram = psi.transpose() * weights.asDiagonal() * psi;
    const Eigen::Index J = gram.rows();
    double dev = (gram - Eigen::MatrixXd::Identity(J, J)).cwiseAbs().maxCoeff();
    if (dev > 1e-6) throw ValidationError("eigendata samples are not orthonormal (deviation " + std::to_string(dev) + ")");
    if (dev > 1e-14) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        b.psi_ = psi * es.operatorInverseSqrt();
    } else {
        b.psi_ = psi;
    }
    if (renormalized_by) *renormalized_by = dev;
    return b;
}

SpectralBasis read_eigendata_csv(int n, const std::string &mu_path, const std::string &psi_path,
                                 std::optional<double> omega) {
    auto mu_rows = read_rows(mu_path);
    auto psi_rows = read_rows(psi_path);
    std::sort(mu_rows.begin(), mu_rows.end(), [](const auto &a, const auto &b) { return a[0] < b[0]; });
    std::vector<double> mu;
    for (const auto &r : mu_rows) {
        if (r.size() < 2) throw ValidationError("eigenvalue rows must be j,mu");
        mu.push_back(r[1]);
    }
    if (psi_rows.empty()) throw ValidationError("no angular samples in " + psi_path);
    const auto J = static_cast<Eigen::Index>(mu.size());
    Eigen::VectorXd nodes(static_cast<Eigen::Index>(psi_rows.size()));
    Eigen::VectorXd weights(nodes.size());
    Eigen::MatrixXd psi(nodes.size(), J);
    for (std::size_t i = 0; i < psi_rows.size(); ++i) {
        const auto &r = psi_rows[i];
        if (static_cast<Eigen::Index>(r.size()) != J + 2) throw ValidationError("angular sample rows must be node,weight,psi_1..psi_J");
        const auto ii = static_cast<Eigen::Index>(i);
        nodes[ii] = r[0];
        weights[ii] = r[1];
        for (Eigen::Index j = 0; j < J; ++j) psi(ii, j) = r[static_cast<std::size_t>(j) + 2];
    }
    return external_eigendata(n, mu, nodes, weights, psi, omega);
}

void write_eigendata_csv(const SpectralBasis &basis, std::ostream &mu_out, std::ostream &psi_out) {
    mu_out << "j,mu\n";
    for (int j = 1; j <= basis.J(); ++j) mu_out << j << ',' << gps::format_double(basis.mode(j).mu) << '\n';
    psi_out << "node,weight";
    for (int j = 1; j <= basis.J(); ++j) psi_out << ",psi_" << j;
    psi_out << '\n';
    for (Eigen::Index i = 0; i < basis.nodes().size(); ++i) {
        psi_out << gps::format_double(basis.nodes()[i]) << ',' << gps::format_double(basis.weights()[i]);
        for (int j = 0; j < basis.J(); ++j) psi_out << ',' << gps::format_double(basis.samples()(i, j));
        psi_out << '\n';
    }
}

std::pair<double, double> lambda_pm(int n, double mu) {
    if (n < 2) throw PreconditionError("dimension n must be >= 2");
    if (!(mu > 0.0)) throw CapacityViolation("eigenvalue mu must be positive (capacity condition), got " + std::to_string(mu));
    const double a = 1.0 - 0.5 * n;
    const double s = std::sqrt(a * a + mu);
    return {a + s, a - s};
}

std::vector<gps::Exponent> exponent_set(const SpectralBasis &basis, double tol) {
    std::vector<gps::Exponent> e;
    for (int j = 1; j <= basis.J(); ++j) {
        e.push_back(basis.lambda_plus_exponent(j));
        e.push_back(basis.minus_lambda_minus_exponent(j));
    }
    std::sort(e.begin(), e.end(), gps::ExponentValueLess{});
    std::vector<gps::Exponent> out;
    for (const auto &x : e)
        if (out.empty() || !out.back().equals(x, tol)) out.push_back(x);
    return out;
}

double h_eval(const SpectralBasis &basis, int j, Sign sign, double r, double theta) {
    if (!(r > 0.0)) throw PreconditionError("h_eval requires r > 0");
    return std::pow(r, basis.lambda(j, sign)) * basis.psi(j, theta);
}

int counting_function(const SpectralBasis &basis, double lam) {
    int c = 0;
    for (const auto &m : basis.modes())
        if (m.lambda_plus <= lam * (1.0 + 1e-14)) ++c;
    return c;
}

int counting_function_minus(const SpectralBasis &basis, double lam) {
    int c = 0;
    for (const auto &m : basis.modes())
        if (-m.lambda_minus <= lam * (1.0 + 1e-14)) ++c;
    return c;
}

double counting_constant(const SpectralBasis &basis) { return 2.0 / basis.mode(1).lambda_plus + 1.0; }

}  // namespace corner::spectral
