#pragma once

#include <array>
#include <complex>

namespace qrob {

using cplx = std::complex<double>;

enum class GateKind { Rx, Rz, Su2, Cz };

// One circuit element. Rx/Rz use angle[0]; Su2 uses angle[0..2] as
// (theta, phi, lambda); Cz uses qubits q0 < q1 and no angles.
struct Gate {
    GateKind kind = GateKind::Rx;
    int q0 = 0;
    int q1 = -1;
    std::array<double, 3> angle{0.0, 0.0, 0.0};

    static Gate rx(int q, double a) { return {GateKind::Rx, q, -1, {a, 0.0, 0.0}}; }
    static Gate rz(int q, double a) { return {GateKind::Rz, q, -1, {a, 0.0, 0.0}}; }
    static Gate su2(int q, double theta, double phi, double lambda) {
        return {GateKind::Su2, q, -1, {theta, phi, lambda}};
    }
    static Gate cz(int qa, int qb) {
        if (qa > qb) std::swap(qa, qb);
        return {GateKind::Cz, qa, qb, {0.0, 0.0, 0.0}};
    }
};

// Column-major would be error prone here; all 2x2 matrices are row-major
// {m00, m01, m10, m11}.
using Mat2 = std::array<cplx, 4>;

Mat2 rx_matrix(double angle);
Mat2 rz_matrix(double angle);

// General single-qubit rotation, defined as the exact product
//   Rz(phi - pi/2) Rx(pi/2) Rz(pi - theta) Rx(pi/2) Rz(lambda - pi/2),
// i.e. the native-gate decomposition used on hardware. det = 1. Closed form:
//   m00 =  cos(theta/2) e^{-i(phi+lambda)/2}
//   m01 = -i sin(theta/2) e^{ i(lambda-phi)/2}
//   m10 = -i sin(theta/2) e^{ i(phi-lambda)/2}
//   m11 =  cos(theta/2) e^{ i(phi+lambda)/2}
Mat2 su2_matrix(double theta, double phi, double lambda);

// Derivative of su2_matrix with respect to one of its angles (0=theta,
// 1=phi, 2=lambda). Used by the adjoint gradient sweep.
Mat2 su2_matrix_deriv(double theta, double phi, double lambda, int which);

Mat2 gate_matrix(const Gate& g);

// Hadamard realized inside SU(2): su2_matrix(pi/2, pi/2, pi/2) equals -i H.
// The phase is unobservable; helpers that need H use these angles.
inline Gate hadamard_as_su2(int q) {
    const double h = 1.5707963267948966;  // pi/2
    return Gate::su2(q, h, h, h);
}

}  // namespace qrob
