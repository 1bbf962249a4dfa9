#include "corner/engine/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "corner/error.hpp"

namespace corner::engine {

using geometry::CutoffKind;
using spectral::Sign;

namespace {

solver::Source transfer_source(const solver::Problem &p, const Eigen::VectorXd &coef, Sign sign) {
    solver::Source out;
    for (int j = 1; j <= coef.size(); ++j) {
        const double a = coef(j - 1);
        if (a == 0.0) continue;
        auto s = p.corrector_source(j, sign);
        for (auto &m : s.modal) m.piece.fn = [fn = m.piece.fn, a](double t) { return -a * fn(t); };
        out.append(s);
    }
    return out;
}

}  // namespace

FixedPointResult coupled_fixed_point(const solver::Problem &p, double eps, const geometry::RhsSpec &rhs,
                                     const FixedPointOptions &opt) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw PreconditionError("coupled_fixed_point: eps must be >= 0");
    const int J = opt.J;
    if (J < 1 || J > p.basis().J()) throw PreconditionError("coupled_fixed_point: J outside 1..basis size");
    geometry::validate_rhs(rhs, p.triple(), p.basis().J());

    const auto f = p.source_f(rhs);
    const auto F = p.source_F(rhs);
    const auto ro = p.omega_extraction_radii();
    const auto rp = p.pattern_extraction_radii();
    Eigen::VectorXd wm(J), wp(J);
    for (int j = 1; j <= J; ++j) {
        wm(j - 1) = std::pow(eps, -p.basis().mode(j).lambda_minus);
        wp(j - 1) = std::pow(eps, p.basis().mode(j).lambda_plus);
    }

    FixedPointResult r;
    r.c = Eigen::VectorXd::Zero(J);
    r.B = Eigen::VectorXd::Zero(J);
    int stalled = 0;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        solver::Source su = f;
        su.append(transfer_source(p, wm.cwiseProduct(r.B), Sign::minus));
        r.u = p.solve(solver::DomainTag::omega, su);
        const Eigen::VectorXd c = spectral::averaged_trace(*r.u, ro, Sign::plus, p.basis()).coefficients.head(J);

        solver::Source sU = F;
        sU.append(transfer_source(p, wp.cwiseProduct(c), Sign::plus));
        r.U = p.solve(solver::DomainTag::pattern, sU);
        const Eigen::VectorXd B = spectral::averaged_trace(*r.U, rp, Sign::minus, p.basis()).coefficients.head(J);

        const double delta = std::max((c - r.c).cwiseAbs().maxCoeff(), (B - r.B).cwiseAbs().maxCoeff());
        const double scale = std::max({1.0, c.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff()});
        r.c = c;
        r.B = B;
        r.iterations = it;
        r.updates.push_back(delta);
        if (eps == 0.0 || delta <= opt.tolerance * scale) {
            r.converged = true;
            break;
        }
        if (r.updates.size() >= 2) {
            const double ratio = delta / r.updates[r.updates.size() - 2];
            stalled = ratio >= 1.0 - 1e-9 ? stalled + 1 : 0;
            if (stalled >= opt.divergence_window) {
                std::ostringstream msg;
                msg << "coupled fixed point does not contract at eps = " << eps << " (update ratio " << ratio
                    << ")";
                throw ContractionFailure(msg.str(), ratio);
            }
        }
    }

    std::vector<double> ratios;
    const double noise = 1e3 * opt.tolerance * std::max({1.0, r.c.cwiseAbs().maxCoeff(), r.B.cwiseAbs().maxCoeff()});
    for (std::size_t k = 1; k < r.updates.size(); ++k)
        if (r.updates[k] > noise && r.updates[k - 1] > 0.0) ratios.push_back(r.updates[k] / r.updates[k - 1]);
    if (!ratios.empty()) {
        std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
        r.contraction_ratio = ratios[ratios.size() / 2];
    }
    if (!r.converged) {
        std::ostringstream msg;
        msg << "coupled fixed point did not converge in " << opt.max_iterations << " iterations";
        throw IterationLimit(msg.str(), r.updates.empty() ? 0.0 : r.updates.back());
    }
    return r;
}

std::vector<double> assemble_fixed_point(const solver::Problem &p, const FixedPointResult &fp, double eps,
                                         const std::vector<Point> &points) {
    if (!(eps > 0.0)) throw PreconditionError("assemble_fixed_point: eps must be positive");
    std::vector<double> out;
    out.reserve(points.size());
    const auto &cut = p.cutoffs();
    for (const auto &pt : points) {
        if (!geometry::omega_eps_contains(p.triple(), eps, pt.r, pt.theta))
            throw OutOfDomain("assemble_fixed_point: point outside Omega_eps");
        const double Phi = cut.eval(CutoffKind::Phi, pt.r / eps, 0);
        const double phi = cut.eval(CutoffKind::phi, pt.r, 0);
        double v = 0.0;
        if (Phi != 0.0) v += Phi * fp.u->value(pt.r, pt.theta);
        if (phi != 0.0) v += phi * fp.U->value(pt.r / eps, pt.theta);
        out.push_back(v);
    }
    return out;
}

}  // namespace corner::engine
