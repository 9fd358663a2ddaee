#include "qrob/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace qrob {

Mat2 rx_matrix(double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    return {cplx(c, 0.0), cplx(0.0, -s), cplx(0.0, -s), cplx(c, 0.0)};
}

Mat2 rz_matrix(double angle) {
    return {std::polar(1.0, -angle / 2.0), cplx(0.0, 0.0),
            cplx(0.0, 0.0), std::polar(1.0, angle / 2.0)};
}

Mat2 su2_matrix(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const cplx mi(0.0, -1.0);
    return {c * std::polar(1.0, -(phi + lambda) / 2.0),
            mi * s * std::polar(1.0, (lambda - phi) / 2.0),
            mi * s * std::polar(1.0, (phi - lambda) / 2.0),
            c * std::polar(1.0, (phi + lambda) / 2.0)};
}

Mat2 su2_matrix_deriv(double theta, double phi, double lambda, int which) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const cplx mi(0.0, -1.0);
    const cplx e00 = std::polar(1.0, -(phi + lambda) / 2.0);
    const cplx e01 = std::polar(1.0, (lambda - phi) / 2.0);
    const cplx e10 = std::polar(1.0, (phi - lambda) / 2.0);
    const cplx e11 = std::polar(1.0, (phi + lambda) / 2.0);
    const cplx ih(0.0, 0.5);
    switch (which) {
        case 0:  // theta
            return {-0.5 * s * e00, mi * 0.5 * c * e01, mi * 0.5 * c * e10, -0.5 * s * e11};
        case 1:  // phi
            return {-ih * c * e00, -ih * mi * s * e01, ih * mi * s * e10, ih * c * e11};
        case 2:  // lambda
            return {-ih * c * e00, ih * mi * s * e01, -ih * mi * s * e10, ih * c * e11};
        default:
            throw std::invalid_argument("su2_matrix_deriv: which must be 0..2");
    }
}

Mat2 gate_matrix(const Gate& g) {
    switch (g.kind) {
        case GateKind::Rx:
            return rx_matrix(g.angle[0]);
        case GateKind::Rz:
            return rz_matrix(g.angle[0]);
        case GateKind::Su2:
            return su2_matrix(g.angle[0], g.angle[1], g.angle[2]);
        case GateKind::Cz:
            throw std::invalid_argument("gate_matrix: CZ is not a single-qubit gate");
    }
    throw std::invalid_argument("gate_matrix: bad gate kind");
}

}  // namespace qrob
