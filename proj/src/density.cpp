#include "qrob/density.hpp"

#include <algorithm>
#include <cmath>

namespace qrob {

Density1Q reduced_density(const StateVector& psi, int q) {
    const std::size_t bit = std::size_t(1) << q;
    const std::size_t lo = bit - 1;
    const std::size_t hi = ~lo;
    const std::size_t pairs = psi.size() >> 1;
    double r00 = 0.0, r11 = 0.0;
    cplx r01(0.0, 0.0);
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::size_t i0 = ((i & hi) << 1) | (i & lo);
        const std::size_t i1 = i0 | bit;
        const cplx a0 = psi[i0];
        const cplx a1 = psi[i1];
        r00 += std::norm(a0);
        r11 += std::norm(a1);
        r01 += a0 * std::conj(a1);
    }
    Density1Q rho;
    rho.m[0] = cplx(r00, 0.0);
    rho.m[1] = r01;
    rho.m[2] = std::conj(r01);
    rho.m[3] = cplx(r11, 0.0);
    return rho;
}

double fidelity(const Density1Q& rho, const Density1Q& sigma) {
    const double tr = (rho.m[0] * sigma.m[0] + rho.m[1] * sigma.m[2] +
                       rho.m[2] * sigma.m[1] + rho.m[3] * sigma.m[3])
                          .real();
    const double dr = std::max(0.0, rho.det());
    const double ds = std::max(0.0, sigma.det());
    const double f = tr + 2.0 * std::sqrt(dr * ds);
    return std::clamp(f, 0.0, 1.0);
}

double basis_probability(const Density1Q& rho, cplx alpha, cplx beta) {
    const cplx v = std::conj(alpha) * (rho.m[0] * alpha + rho.m[1] * beta) +
                   std::conj(beta) * (rho.m[2] * alpha + rho.m[3] * beta);
    return v.real();
}

}  // namespace qrob
