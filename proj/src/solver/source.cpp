#include "corner/solver/source.hpp"

#include "corner/spectral/basis.hpp"

namespace corner::solver {

double Source::value(double t, double theta, const spectral::SpectralBasis &basis) const {
    double s = 0.0;
    for (const auto &m : modal) {
        if (t < m.piece.lo || t > m.piece.hi) continue;
        const double radial = m.piece.fn(t);
        if (radial != 0.0) s += radial * basis.psi(m.mode, theta);
    }
    if (gridded) s += gridded(t, theta);
    return s;
}

std::vector<SourcePiece> Source::pieces_for(int mode) const {
    std::vector<SourcePiece> out;
    for (const auto &m : modal)
        if (m.mode == mode) out.push_back(m.piece);
    return out;
}

void Source::append(const Source &other) {
    modal.insert(modal.end(), other.modal.begin(), other.modal.end());
    if (other.gridded) {
        if (gridded) {
            auto a = gridded;
            auto b = other.gridded;
            gridded = [a, b](double t, double th) { return a(t, th) + b(t, th); };
        } else {
            gridded = other.gridded;
        }
    }
}

}  // namespace corner::solver
