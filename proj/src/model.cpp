#include "qrob/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qrob {

namespace {

// SU2 slots fire in the order lambda, theta, phi (see SlotBinding docs).
constexpr int kSu2SlotOrder[3] = {2, 0, 1};

void check_blocks(int n, const std::vector<int>& blocks) {
    if (n < 2) throw std::invalid_argument("model needs at least 2 qubits");
    if (blocks.empty()) throw std::invalid_argument("block list is empty");
    for (int b : blocks)
        if (b < 1 || b > n)
            throw std::invalid_argument("block size outside [1, num_qubits]");
}

// Appends one variational block: SU2 layer over the centered span, then a
// CZ brickwork pass over the same span. Emits slot skeletons (indices are
// assigned by the caller).
void append_block(Circuit& c, int n, int b) {
    const int start = (n - b) / 2;
    for (int q = start; q < start + b; ++q) {
        c.gates.push_back(Gate::su2(q, 0.0, 0.0, 0.0));
        const int g = static_cast<int>(c.gates.size()) - 1;
        for (int a : kSu2SlotOrder) c.slots.push_back({g, a, 0.0, -1, -1});
    }
    for (int off = 0; off + 1 < b; off += 2)
        c.gates.push_back(Gate::cz(start + off, start + off + 1));
    for (int off = 1; off + 1 < b; off += 2)
        c.gates.push_back(Gate::cz(start + off, start + off + 1));
}

void append_variational(Circuit& c, int n, const std::vector<int>& blocks,
                        int output_qubit) {
    for (int b : blocks) append_block(c, n, b);
    c.gates.push_back(Gate::rx(output_qubit, 0.0));
    c.slots.push_back({static_cast<int>(c.gates.size()) - 1, 0, 0.0, -1, -1});
}

}  // namespace

Model build_emnist_model(int num_qubits, const std::vector<int>& block_sizes,
                         int num_features) {
    check_blocks(num_qubits, block_sizes);
    int su2_count = 0;
    for (int b : block_sizes) su2_count += b;
    const int num_params = 3 * su2_count + 1;
    if (num_features < 1 || num_features > 3 * su2_count)
        throw std::invalid_argument("num_features must fit in the SU2 slots");

    Model m;
    m.spec = {"emnist", num_qubits, block_sizes, num_features};
    m.output_qubit = num_qubits / 2;
    Circuit& c = m.circuit;
    c.num_qubits = num_qubits;
    append_variational(c, num_qubits, block_sizes, m.output_qubit);

    // Every slot is trainable; the first num_features also receive a pixel.
    int next = 0;
    for (SlotBinding& s : c.slots) {
        s.theta_index = next;
        if (next < num_features) s.data_index = next;
        ++next;
    }
    c.num_params = num_params;
    c.num_features = num_features;
    c.validate();
    return m;
}

Circuit lcei_prep_circuit(int num_qubits) {
    Circuit c;
    c.num_qubits = num_qubits;
    // Cluster-state preparation: H everywhere, nearest-neighbour CZ chain.
    for (int q = 0; q < num_qubits; ++q) c.gates.push_back(hadamard_as_su2(q));
    for (int q = 0; q + 1 < num_qubits; ++q) c.gates.push_back(Gate::cz(q, q + 1));
    // Excitation encoding: data-only Rx(alpha_q).
    for (int q = 0; q < num_qubits; ++q) {
        c.gates.push_back(Gate::rx(q, 0.0));
        c.slots.push_back({static_cast<int>(c.gates.size()) - 1, 0, 0.0, -1, q});
    }
    c.num_params = 0;
    c.num_features = num_qubits;
    c.validate();
    return c;
}

Model build_lcei_model(int num_qubits, const std::vector<int>& block_sizes) {
    check_blocks(num_qubits, block_sizes);
    Model m;
    m.spec = {"lcei", num_qubits, block_sizes, num_qubits};
    m.output_qubit = num_qubits / 2;
    Circuit& c = m.circuit;
    c = lcei_prep_circuit(num_qubits);

    append_variational(c, num_qubits, block_sizes, m.output_qubit);

    int next = 0;
    for (SlotBinding& s : c.slots) {
        if (s.data_index >= 0) continue;  // prep Rx slots carry no theta
        s.theta_index = next++;
    }
    int su2_count = 0;
    for (int b : block_sizes) su2_count += b;
    c.num_params = 3 * su2_count + 1;
    c.num_features = num_qubits;
    c.validate();
    return m;
}

Model build_model(const ModelSpec& spec) {
    if (spec.task == "emnist")
        return build_emnist_model(spec.num_qubits, spec.block_sizes, spec.num_features);
    if (spec.task == "lcei") {
        if (spec.num_features != spec.num_qubits)
            throw std::invalid_argument("lcei model needs num_features == num_qubits");
        return build_lcei_model(spec.num_qubits, spec.block_sizes);
    }
    throw std::invalid_argument("unknown model task: " + spec.task);
}

Prediction predict(const Model& m, std::span<const double> theta,
                   std::span<const double> x) {
    const StateVector psi = run_circuit(m.circuit, theta, x);
    Prediction out;
    out.expectation = psi.expectation_z(m.output_qubit);
    out.p = (out.expectation + 1.0) / 2.0;
    out.label_hat = out.p > 0.5 ? 1 : 0;
    return out;
}

namespace {
double clamp_p(double p) { return std::clamp(p, 1e-12, 1.0 - 1e-12); }
}  // namespace

double cross_entropy(double p, int label) {
    const double q = clamp_p(p);
    return label == 1 ? -std::log(q) : -std::log(1.0 - q);
}

double cross_entropy_dp(double p, int label) {
    const double q = clamp_p(p);
    return label == 1 ? -1.0 / q : 1.0 / (1.0 - q);
}

EmnistProfile emnist_profile(std::string_view name) {
    if (name == "desk-12q") return {"desk-12q", 12, {12, 10, 8, 6, 4}, 10, 10};
    if (name == "full-20q") return {"full-20q", 20, {20, 16, 12, 8, 4}, 15, 13};
    throw std::invalid_argument("unknown profile: " + std::string(name));
}

LceiProfile lcei_profile(std::string_view name) {
    if (name == "desk-12q") return {"desk-12q", 12, {12, 10, 8, 6, 4}};
    if (name == "full-20q") return {"full-20q", 20, {20, 16, 12, 8, 4}};
    throw std::invalid_argument("unknown profile: " + std::string(name));
}

}  // namespace qrob
