#pragma once

// Reference implementations used only by tests. Everything here is written
// the slow obvious way (dense matrices, full eigendecompositions) so the
// production kernels are checked against an independent path.

#include <cassert>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qrob/density.hpp"
#include "qrob/gates.hpp"
#include "qrob/rng.hpp"

namespace oracle {

using qrob::cplx;

// Dense square complex matrix, row-major.
struct DMat {
    std::size_t n = 0;
    std::vector<cplx> a;

    DMat() = default;
    explicit DMat(std::size_t dim) : n(dim), a(dim * dim, cplx(0, 0)) {}

    cplx& at(std::size_t r, std::size_t c) { return a[r * n + c]; }
    const cplx& at(std::size_t r, std::size_t c) const { return a[r * n + c]; }

    static DMat identity(std::size_t dim) {
        DMat m(dim);
        for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
        return m;
    }
};

inline DMat matmul(const DMat& x, const DMat& y) {
    assert(x.n == y.n);
    DMat out(x.n);
    for (std::size_t r = 0; r < x.n; ++r)
        for (std::size_t k = 0; k < x.n; ++k) {
            const cplx v = x.at(r, k);
            if (v == cplx(0, 0)) continue;
            for (std::size_t c = 0; c < x.n; ++c) out.at(r, c) += v * y.at(k, c);
        }
    return out;
}

inline DMat kron(const DMat& x, const DMat& y) {
    DMat out(x.n * y.n);
    for (std::size_t xr = 0; xr < x.n; ++xr)
        for (std::size_t xc = 0; xc < x.n; ++xc)
            for (std::size_t yr = 0; yr < y.n; ++yr)
                for (std::size_t yc = 0; yc < y.n; ++yc)
                    out.at(xr * y.n + yr, xc * y.n + yc) = x.at(xr, xc) * y.at(yr, yc);
    return out;
}

inline std::vector<cplx> matvec(const DMat& m, const std::vector<cplx>& v) {
    assert(m.n == v.size());
    std::vector<cplx> out(m.n, cplx(0, 0));
    for (std::size_t r = 0; r < m.n; ++r)
        for (std::size_t c = 0; c < m.n; ++c) out[r] += m.at(r, c) * v[c];
    return out;
}

inline DMat from_mat2(const qrob::Mat2& m) {
    DMat d(2);
    d.at(0, 0) = m[0];
    d.at(0, 1) = m[1];
    d.at(1, 0) = m[2];
    d.at(1, 1) = m[3];
    return d;
}

// Embeds a 1-qubit matrix at qubit q of an n-qubit register where qubit 0 is
// the least significant index bit: kron(I_high, M, I_low).
inline DMat embed_1q(const qrob::Mat2& m, int q, int num_qubits) {
    const DMat lo = DMat::identity(std::size_t(1) << q);
    const DMat hi = DMat::identity(std::size_t(1) << (num_qubits - 1 - q));
    return kron(hi, kron(from_mat2(m), lo));
}

inline DMat dense_cz(int qa, int qb, int num_qubits) {
    const std::size_t dim = std::size_t(1) << num_qubits;
    DMat out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const bool both = ((i >> qa) & 1) && ((i >> qb) & 1);
        out.at(i, i) = both ? -1.0 : 1.0;
    }
    return out;
}

// Full density matrix |psi><psi| followed by a partial trace onto qubit q.
inline qrob::Density1Q partial_trace_oracle(const std::vector<cplx>& psi, int q) {
    const std::size_t dim = psi.size();
    qrob::Density1Q rho;
    rho.m[0] = rho.m[1] = rho.m[2] = rho.m[3] = cplx(0, 0);
    std::vector<cplx> full(dim * dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) full[r * dim + c] = psi[r] * std::conj(psi[c]);
    const std::size_t bit = std::size_t(1) << q;
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) {
            if ((r & ~bit) != (c & ~bit)) continue;  // off-block elements traced away
            const int rb = (r & bit) ? 1 : 0;
            const int cb = (c & bit) ? 1 : 0;
            rho.m[2 * rb + cb] += full[r * dim + c];
        }
    return rho;
}

// Hermitian 2x2 eigendecomposition with explicit eigenvectors.
struct Eig2 {
    double lam0, lam1;       // lam0 <= lam1
    cplx v0[2], v1[2];       // orthonormal
};

inline Eig2 eig_hermitian2(const qrob::Density1Q& h) {
    const double a = h.m[0].real();
    const double d = h.m[3].real();
    const cplx b = h.m[1];
    const double mean = (a + d) / 2.0;
    const double disc = std::sqrt(std::max(0.0, (a - d) * (a - d) / 4.0 + std::norm(b)));
    Eig2 e;
    e.lam0 = mean - disc;
    e.lam1 = mean + disc;
    if (std::abs(b) < 1e-300) {
        const bool swap = a > d;
        e.v0[0] = swap ? 0.0 : 1.0;
        e.v0[1] = swap ? 1.0 : 0.0;
        e.v1[0] = swap ? 1.0 : 0.0;
        e.v1[1] = swap ? 0.0 : 1.0;
        return e;
    }
    auto fill = [&](double lam, cplx* v) {
        // (H - lam I) v = 0 -> v proportional to (b, lam - a)
        cplx u0 = b, u1 = cplx(lam - a, 0.0);
        const double norm = std::sqrt(std::norm(u0) + std::norm(u1));
        v[0] = u0 / norm;
        v[1] = u1 / norm;
    };
    fill(e.lam0, e.v0);
    fill(e.lam1, e.v1);
    return e;
}

inline qrob::Density1Q sqrt_psd2(const qrob::Density1Q& h) {
    const Eig2 e = eig_hermitian2(h);
    const double s0 = std::sqrt(std::max(0.0, e.lam0));
    const double s1 = std::sqrt(std::max(0.0, e.lam1));
    qrob::Density1Q out;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            out.m[2 * r + c] = s0 * e.v0[r] * std::conj(e.v0[c]) +
                               s1 * e.v1[r] * std::conj(e.v1[c]);
    return out;
}

inline qrob::Density1Q mul2(const qrob::Density1Q& x, const qrob::Density1Q& y) {
    qrob::Density1Q out;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            out.m[2 * r + c] = x.m[2 * r + 0] * y.m[0 + c] + x.m[2 * r + 1] * y.m[2 + c];
    return out;
}

// Uhlmann fidelity the textbook way: (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double fidelity_oracle(const qrob::Density1Q& rho, const qrob::Density1Q& sigma) {
    const qrob::Density1Q s = sqrt_psd2(rho);
    const qrob::Density1Q inner = mul2(mul2(s, sigma), s);
    const qrob::Density1Q r = sqrt_psd2(inner);
    const double tr = (r.m[0] + r.m[3]).real();
    return tr * tr;
}

// Random single-qubit density matrix: a two-point mixture of Haar-ish pure
// states. Covers ranks 1 and 2.
inline qrob::Density1Q random_density(qrob::Rng& rng) {
    auto pure = [&rng]() {
        cplx v0(rng.normal(), rng.normal());
        cplx v1(rng.normal(), rng.normal());
        const double n = std::sqrt(std::norm(v0) + std::norm(v1));
        v0 /= n;
        v1 /= n;
        qrob::Density1Q d;
        d.m[0] = v0 * std::conj(v0);
        d.m[1] = v0 * std::conj(v1);
        d.m[2] = v1 * std::conj(v0);
        d.m[3] = v1 * std::conj(v1);
        return d;
    };
    const double w = rng.uniform();
    const qrob::Density1Q p = pure();
    const qrob::Density1Q q = pure();
    qrob::Density1Q out;
    for (int i = 0; i < 4; ++i) out.m[i] = w * p.m[i] + (1.0 - w) * q.m[i];
    return out;
}

}  // namespace oracle
