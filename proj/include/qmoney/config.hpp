#pragma once

namespace qm {

// Floating-point tolerances used by the spectral and protocol layers.
struct Tolerances {
    double residual = 1e-8;
    double symmetry = 1e-10;
    double commutation = 1e-10;
    double orthonormality = 1e-9;
    double ramanujan = 1e-8;
    double eisenstein = 1e-8;
    double table = 1e-6;
    double state_norm = 1e-10;
    // Relative eigenvalue gap below which a random combination counts as degenerate.
    double degeneracy = 1e-9;
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t;
    return t;
}

}  // namespace qm
