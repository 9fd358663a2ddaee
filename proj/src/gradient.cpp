#include "qrob/gradient.hpp"

#include <cmath>
#include <stdexcept>

namespace qrob {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

Mat2 dagger(const Mat2& m) {
    return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])};
}

Mat2 gate_matrix_deriv(const Gate& g, int angle_index) {
    const double c = std::cos(g.angle[0] / 2.0) / 2.0;
    const double s = std::sin(g.angle[0] / 2.0) / 2.0;
    switch (g.kind) {
        case GateKind::Rx:
            return {cplx(-s, 0), cplx(0, -c), cplx(0, -c), cplx(-s, 0)};
        case GateKind::Rz:
            return {cplx(0, -0.5) * std::polar(1.0, -g.angle[0] / 2.0), cplx(0, 0),
                    cplx(0, 0), cplx(0, 0.5) * std::polar(1.0, g.angle[0] / 2.0)};
        case GateKind::Su2:
            return su2_matrix_deriv(g.angle[0], g.angle[1], g.angle[2], angle_index);
        case GateKind::Cz:
            break;
    }
    throw std::invalid_argument("gate_matrix_deriv: gate has no angle");
}

void unapply_gate(StateVector& psi, const Gate& g) {
    switch (g.kind) {
        case GateKind::Cz:
            psi.apply_cz(g.q0, g.q1);
            return;
        case GateKind::Rx:
            psi.apply_rx(g.q0, -g.angle[0]);
            return;
        case GateKind::Rz:
            psi.apply_rz(g.q0, -g.angle[0]);
            return;
        case GateKind::Su2:
            psi.apply_matrix(g.q0, dagger(su2_matrix(g.angle[0], g.angle[1], g.angle[2])));
            return;
    }
    throw std::invalid_argument("unapply_gate: bad gate kind");
}

// <lambda| dM_q |psi> summed over the strided amplitude pairs of qubit q.
cplx bracket_1q(const StateVector& lambda, const StateVector& psi, int q,
                const Mat2& dm) {
    const std::size_t bit = std::size_t(1) << q;
    const std::size_t lo = bit - 1;
    const std::size_t hi = ~lo;
    const std::size_t pairs = psi.size() >> 1;
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::size_t i0 = ((i & hi) << 1) | (i & lo);
        const std::size_t i1 = i0 | bit;
        const cplx p0 = psi[i0], p1 = psi[i1];
        acc += std::conj(lambda[i0]) * (dm[0] * p0 + dm[1] * p1);
        acc += std::conj(lambda[i1]) * (dm[2] * p0 + dm[3] * p1);
    }
    return acc;
}

// Slots grouped by owning gate, preserving slot order within a gate.
std::vector<std::vector<int>> slots_by_gate(const Circuit& c) {
    std::vector<std::vector<int>> by_gate(c.gates.size());
    for (int s = 0; s < static_cast<int>(c.slots.size()); ++s)
        by_gate[c.slots[s].gate].push_back(s);
    return by_gate;
}

// d<sigma_z>/d(slot angle) for each slot, by shifted executions. When `want`
// is non-null, slots with want[s] == false are skipped (derivative 0).
std::vector<double> psr_slot_gradient(const Model& m, const std::vector<Gate>& gates,
                                      const std::vector<bool>* want) {
    const Circuit& c = m.circuit;
    std::vector<double> dslot(c.slots.size(), 0.0);
    const auto by_gate = slots_by_gate(c);

    StateVector prefix(c.num_qubits);
    for (std::size_t g = 0; g < gates.size(); ++g) {
        for (int s : by_gate[g]) {
            if (want && !(*want)[s]) continue;
            double e[2];
            for (int side = 0; side < 2; ++side) {
                Gate shifted = gates[g];
                shifted.angle[c.slots[s].angle] += side == 0 ? kHalfPi : -kHalfPi;
                StateVector psi = prefix;
                psi.apply_gate(shifted);
                for (std::size_t h = g + 1; h < gates.size(); ++h)
                    psi.apply_gate(gates[h]);
                e[side] = psi.expectation_z(m.output_qubit);
            }
            dslot[s] = (e[0] - e[1]) / 2.0;
        }
        prefix.apply_gate(gates[g]);
    }
    return dslot;
}

// Same derivatives from one forward pass plus one backward sweep.
std::vector<double> adjoint_slot_gradient(const Model& m, const std::vector<Gate>& gates,
                                          double* expectation_out) {
    const Circuit& c = m.circuit;
    const auto by_gate = slots_by_gate(c);

    StateVector psi(c.num_qubits);
    for (const Gate& g : gates) psi.apply_gate(g);
    if (expectation_out) *expectation_out = psi.expectation_z(m.output_qubit);

    StateVector lambda = psi;
    lambda.apply_pauli(m.output_qubit, 'Z');

    std::vector<double> dslot(c.slots.size(), 0.0);
    for (int g = static_cast<int>(gates.size()) - 1; g >= 0; --g) {
        unapply_gate(psi, gates[g]);  // psi is now the state before gate g
        for (int s : by_gate[g]) {
            const Mat2 dm = gate_matrix_deriv(gates[g], c.slots[s].angle);
            dslot[s] = 2.0 * bracket_1q(lambda, psi, gates[g].q0, dm).real();
        }
        unapply_gate(lambda, gates[g]);
    }
    return dslot;
}

}  // namespace

GradEngine grad_engine_from_string(std::string_view s) {
    if (s == "psr") return GradEngine::Psr;
    if (s == "adjoint") return GradEngine::Adjoint;
    throw std::invalid_argument("unknown gradient engine: " + std::string(s));
}

const char* to_string(GradEngine e) {
    return e == GradEngine::Psr ? "psr" : "adjoint";
}

std::vector<double> psr_expectation_gradient(const Model& m,
                                             std::span<const double> theta,
                                             std::span<const double> x) {
    const auto gates = m.circuit.resolve(theta, x);
    std::vector<bool> want(m.circuit.slots.size(), false);
    for (std::size_t s = 0; s < m.circuit.slots.size(); ++s)
        want[s] = m.circuit.slots[s].theta_index >= 0;
    const auto dslot = psr_slot_gradient(m, gates, &want);
    std::vector<double> grad(m.num_params(), 0.0);
    for (std::size_t s = 0; s < m.circuit.slots.size(); ++s)
        if (m.circuit.slots[s].theta_index >= 0)
            grad[m.circuit.slots[s].theta_index] = dslot[s];
    return grad;
}

LossGradient loss_gradient(const Model& m, std::span<const double> theta,
                           std::span<const double> x, int label,
                           GradEngine engine, bool want_input_grad) {
    const auto gates = m.circuit.resolve(theta, x);
    std::vector<double> dslot;
    double expectation = 0.0;
    if (engine == GradEngine::Adjoint) {
        dslot = adjoint_slot_gradient(m, gates, &expectation);
    } else {
        std::vector<bool> want(m.circuit.slots.size(), false);
        for (std::size_t s = 0; s < m.circuit.slots.size(); ++s) {
            const SlotBinding& b = m.circuit.slots[s];
            want[s] = b.theta_index >= 0 || (want_input_grad && b.data_index >= 0);
        }
        dslot = psr_slot_gradient(m, gates, &want);
        StateVector psi(m.circuit.num_qubits);
        for (const Gate& g : gates) psi.apply_gate(g);
        expectation = psi.expectation_z(m.output_qubit);
    }

    LossGradient out;
    out.expectation = expectation;
    out.p = (expectation + 1.0) / 2.0;
    out.loss = cross_entropy(out.p, label);
    const double chain = cross_entropy_dp(out.p, label) * 0.5;  // dp/dE = 1/2

    out.dtheta.assign(m.num_params(), 0.0);
    if (want_input_grad) out.dx.assign(m.num_features(), 0.0);
    for (std::size_t s = 0; s < m.circuit.slots.size(); ++s) {
        const SlotBinding& b = m.circuit.slots[s];
        const double d = chain * dslot[s];
        if (b.theta_index >= 0) out.dtheta[b.theta_index] += d;
        if (want_input_grad && b.data_index >= 0) out.dx[b.data_index] += d;
    }
    return out;
}

std::vector<double> input_gradient(const Model& m, std::span<const double> theta,
                                   std::span<const double> x, int label,
                                   GradEngine engine,
                                   const std::vector<std::uint8_t>* mask) {
    if (mask && static_cast<int>(mask->size()) != m.num_features())
        throw std::invalid_argument("input_gradient: mask size mismatch");

    std::vector<double> dx(m.num_features(), 0.0);
    if (engine == GradEngine::Adjoint) {
        LossGradient lg = loss_gradient(m, theta, x, label, engine, true);
        for (int j = 0; j < m.num_features(); ++j)
            dx[j] = (mask && !(*mask)[j]) ? 0.0 : lg.dx[j];
        return dx;
    }

    const auto gates = m.circuit.resolve(theta, x);
    std::vector<bool> want(m.circuit.slots.size(), false);
    for (std::size_t s = 0; s < m.circuit.slots.size(); ++s) {
        const int j = m.circuit.slots[s].data_index;
        want[s] = j >= 0 && (!mask || (*mask)[j]);
    }
    const auto dslot = psr_slot_gradient(m, gates, &want);

    StateVector psi(m.circuit.num_qubits);
    for (const Gate& g : gates) psi.apply_gate(g);
    const double p = (psi.expectation_z(m.output_qubit) + 1.0) / 2.0;
    const double chain = cross_entropy_dp(p, label) * 0.5;
    for (std::size_t s = 0; s < m.circuit.slots.size(); ++s) {
        const int j = m.circuit.slots[s].data_index;
        if (j >= 0 && want[s]) dx[j] += chain * dslot[s];
    }
    return dx;
}

}  // namespace qrob
