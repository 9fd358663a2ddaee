#include "qrob/circuit.hpp"

#include <stdexcept>
#include <string>

namespace qrob {

void Circuit::validate() const {
    std::vector<int> theta_seen(num_params, 0);
    std::vector<int> data_seen(num_features, 0);
    for (const SlotBinding& s : slots) {
        if (s.gate < 0 || s.gate >= static_cast<int>(gates.size()))
            throw std::logic_error("circuit slot points at a missing gate");
        if (s.angle < 0 || s.angle > 2)
            throw std::logic_error("circuit slot has a bad angle index");
        if (gates[s.gate].kind == GateKind::Cz)
            throw std::logic_error("circuit slot bound to a CZ gate");
        if (s.theta_index >= 0) {
            if (s.theta_index >= num_params)
                throw std::logic_error("theta index out of range");
            ++theta_seen[s.theta_index];
        }
        if (s.data_index >= 0) {
            if (s.data_index >= num_features)
                throw std::logic_error("data index out of range");
            ++data_seen[s.data_index];
        }
    }
    for (int i = 0; i < num_params; ++i)
        if (theta_seen[i] != 1)
            throw std::logic_error("theta index " + std::to_string(i) +
                                   " bound " + std::to_string(theta_seen[i]) +
                                   " times, expected once");
    for (int i = 0; i < num_features; ++i)
        if (data_seen[i] != 1)
            throw std::logic_error("data index " + std::to_string(i) +
                                   " bound " + std::to_string(data_seen[i]) +
                                   " times, expected once");
}

std::vector<Gate> Circuit::resolve(std::span<const double> theta,
                                   std::span<const double> x) const {
    if (static_cast<int>(theta.size()) != num_params)
        throw std::invalid_argument("resolve: theta size mismatch");
    if (static_cast<int>(x.size()) != num_features)
        throw std::invalid_argument("resolve: feature size mismatch");
    std::vector<Gate> out = gates;
    for (const SlotBinding& s : slots) {
        double a = s.base;
        if (s.theta_index >= 0) a += theta[s.theta_index];
        if (s.data_index >= 0) a += x[s.data_index];
        out[s.gate].angle[s.angle] = a;
    }
    return out;
}

StateVector run_circuit(const Circuit& c, std::span<const double> theta,
                        std::span<const double> x) {
    StateVector psi(c.num_qubits);
    for (const Gate& g : c.resolve(theta, x)) psi.apply_gate(g);
    return psi;
}

}  // namespace qrob
