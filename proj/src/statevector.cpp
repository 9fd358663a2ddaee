#include "qrob/statevector.hpp"

#include <cmath>
#include <stdexcept>

namespace qrob {

StateVector::StateVector(int num_qubits) : nq_(num_qubits) {
    if (num_qubits < 1 || num_qubits > 30)
        throw std::invalid_argument("StateVector: qubit count out of range");
    amps_.assign(std::size_t(1) << num_qubits, cplx(0.0, 0.0));
    amps_[0] = cplx(1.0, 0.0);
}

void StateVector::reset() {
    std::fill(amps_.begin(), amps_.end(), cplx(0.0, 0.0));
    amps_[0] = cplx(1.0, 0.0);
}

void StateVector::check_qubit(int q) const {
    if (q < 0 || q >= nq_) throw std::out_of_range("StateVector: bad qubit index");
}

void StateVector::apply_matrix(int q, const Mat2& m) {
    check_qubit(q);
    const std::size_t bit = std::size_t(1) << q;
    const std::size_t lo = bit - 1;
    const std::size_t hi = ~lo;
    const std::size_t pairs = amps_.size() >> 1;
    const cplx m00 = m[0], m01 = m[1], m10 = m[2], m11 = m[3];
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::size_t i0 = ((i & hi) << 1) | (i & lo);
        const std::size_t i1 = i0 | bit;
        const cplx v0 = amps_[i0];
        const cplx v1 = amps_[i1];
        amps_[i0] = m00 * v0 + m01 * v1;
        amps_[i1] = m10 * v0 + m11 * v1;
    }
}

void StateVector::apply_rx(int q, double angle) { apply_matrix(q, rx_matrix(angle)); }

void StateVector::apply_rz(int q, double angle) {
    check_qubit(q);
    // Diagonal, so no pair shuffling needed.
    const cplx d0 = std::polar(1.0, -angle / 2.0);
    const cplx d1 = std::polar(1.0, angle / 2.0);
    const std::size_t bit = std::size_t(1) << q;
    for (std::size_t i = 0; i < amps_.size(); ++i)
        amps_[i] *= (i & bit) ? d1 : d0;
}

void StateVector::apply_su2(int q, double theta, double phi, double lambda) {
    apply_matrix(q, su2_matrix(theta, phi, lambda));
}

void StateVector::apply_cz(int qa, int qb) {
    check_qubit(qa);
    check_qubit(qb);
    if (qa == qb) throw std::invalid_argument("apply_cz: qubits must differ");
    const std::size_t ba = std::size_t(1) << qa;
    const std::size_t bb = std::size_t(1) << qb;
    const std::size_t both = ba | bb;
    for (std::size_t i = 0; i < amps_.size(); ++i)
        if ((i & both) == both) amps_[i] = -amps_[i];
}

void StateVector::apply_gate(const Gate& g) {
    switch (g.kind) {
        case GateKind::Cz:
            apply_cz(g.q0, g.q1);
            return;
        case GateKind::Rz:
            apply_rz(g.q0, g.angle[0]);
            return;
        case GateKind::Rx:
            apply_rx(g.q0, g.angle[0]);
            return;
        case GateKind::Su2:
            apply_su2(g.q0, g.angle[0], g.angle[1], g.angle[2]);
            return;
    }
    throw std::invalid_argument("apply_gate: bad gate kind");
}

void StateVector::apply_pauli(int q, char pauli) {
    switch (pauli) {
        case 'X':
            apply_matrix(q, {cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)});
            return;
        case 'Y':
            apply_matrix(q, {cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0)});
            return;
        case 'Z':
            apply_matrix(q, {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(-1, 0)});
            return;
        default:
            throw std::invalid_argument("apply_pauli: expected X, Y or Z");
    }
}

double StateVector::norm_sq() const {
    double n = 0.0;
    for (const cplx& a : amps_) n += std::norm(a);
    return n;
}

double StateVector::prob_zero(int q) const {
    check_qubit(q);
    const std::size_t bit = std::size_t(1) << q;
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i)
        if (!(i & bit)) p += std::norm(amps_[i]);
    return p;
}

double StateVector::expectation_z(int q) const { return 2.0 * prob_zero(q) - 1.0; }

cplx inner_product(const StateVector& a, const StateVector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("inner_product: dimension mismatch");
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double expectation_pauli_string(const StateVector& psi,
                                const std::vector<std::pair<int, char>>& ops) {
    StateVector phi = psi;
    for (const auto& [q, p] : ops) phi.apply_pauli(q, p);
    return inner_product(psi, phi).real();
}

std::pair<std::uint64_t, std::uint64_t> sample_counts(const StateVector& psi, int q,
                                                      std::uint64_t shots, Rng& rng) {
    const double p1 = 1.0 - psi.prob_zero(q);
    std::uint64_t ones = 0;
    for (std::uint64_t s = 0; s < shots; ++s)
        if (rng.uniform() < p1) ++ones;
    return {shots - ones, ones};
}

}  // namespace qrob
