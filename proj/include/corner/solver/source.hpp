#pragma once

#include <functional>
#include <vector>

#include "corner/solver/radial.hpp"

namespace corner::spectral {
class SpectralBasis;
}

namespace corner::solver {

// Right-hand side of the flat equation w_tt + w_thth = s(t, theta) in
// t = ln r (the physical rhs already multiplied by e^{2t}).
struct Source {
    struct ModalTerm {
        int mode = 1;
        SourcePiece piece;  // radial factor; angular factor psi_mode
    };

    std::vector<ModalTerm> modal;
    // Non-separable part, when present the source is not modal.
    std::function<double(double, double)> gridded;

    bool is_modal() const { return !gridded; }
    bool empty() const { return modal.empty() && !gridded; }
    double value(double t, double theta, const spectral::SpectralBasis &basis) const;
    // Pieces of the given mode (modal sources only).
    std::vector<SourcePiece> pieces_for(int mode) const;

    void append(const Source &other);
};

}  // namespace corner::solver
