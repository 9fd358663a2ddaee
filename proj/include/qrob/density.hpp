#pragma once

#include "qrob/statevector.hpp"

namespace qrob {

// Single-qubit density matrix, row-major {r00, r01, r10, r11}.
// Valid states are Hermitian, PSD, unit trace.
struct Density1Q {
    cplx m[4]{cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(0, 0)};

    cplx& operator()(int r, int c) { return m[2 * r + c]; }
    const cplx& operator()(int r, int c) const { return m[2 * r + c]; }

    double trace() const { return (m[0] + m[3]).real(); }
    // Real for Hermitian inputs; tiny negative values from rounding are kept
    // as is, callers clamp where it matters.
    double det() const { return (m[0] * m[3] - m[1] * m[2]).real(); }
};

// Partial trace of |psi><psi| onto one qubit.
Density1Q reduced_density(const StateVector& psi, int q);

// Uhlmann fidelity F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, via the 2x2
// closed form F = Tr(rho sigma) + 2 sqrt(det(rho) det(sigma)).
// Result clamped to [0, 1].
double fidelity(const Density1Q& rho, const Density1Q& sigma);

inline double infidelity(const Density1Q& rho, const Density1Q& sigma) {
    return 1.0 - fidelity(rho, sigma);
}

// <phi| rho |phi> for the basis vector phi = alpha|0> + beta|1>.
double basis_probability(const Density1Q& rho, cplx alpha, cplx beta);

}  // namespace qrob
