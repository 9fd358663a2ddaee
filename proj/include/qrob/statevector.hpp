#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qrob/gates.hpp"
#include "qrob/rng.hpp"

namespace qrob {

// Dense state vector over num_qubits qubits. Qubit q owns bit q of the
// amplitude index (qubit 0 = least significant bit). Gates act in place.
class StateVector {
public:
    explicit StateVector(int num_qubits);

    int num_qubits() const { return nq_; }
    std::size_t size() const { return amps_.size(); }

    cplx& operator[](std::size_t i) { return amps_[i]; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }
    const std::vector<cplx>& amplitudes() const { return amps_; }

    // Back to |0...0>.
    void reset();

    void apply_matrix(int q, const Mat2& m);
    void apply_rx(int q, double angle);
    void apply_rz(int q, double angle);
    void apply_su2(int q, double theta, double phi, double lambda);
    void apply_cz(int qa, int qb);
    void apply_gate(const Gate& g);
    void apply_pauli(int q, char pauli);  // 'X', 'Y' or 'Z'

    double norm_sq() const;
    double prob_zero(int q) const;

    // <sigma_z> on one qubit; in [-1, 1].
    double expectation_z(int q) const;

private:
    int nq_;
    std::vector<cplx> amps_;
    void check_qubit(int q) const;
};

cplx inner_product(const StateVector& a, const StateVector& b);

// <psi| P |psi> for a tensor product of single-qubit Paulis, given as
// (qubit, 'X'|'Y'|'Z') pairs. Real for Hermitian P; the real part is returned.
double expectation_pauli_string(const StateVector& psi,
                                const std::vector<std::pair<int, char>>& ops);

// Z-basis readout emulation on one qubit: draws `shots` Bernoulli samples of
// outcome |1> with the exact probability 1 - prob_zero(q). Returns counts
// (zeros, ones); zeros + ones == shots.
std::pair<std::uint64_t, std::uint64_t> sample_counts(const StateVector& psi, int q,
                                                      std::uint64_t shots, Rng& rng);

}  // namespace qrob
