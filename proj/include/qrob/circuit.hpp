#pragma once

#include <span>
#include <vector>

#include "qrob/statevector.hpp"

namespace qrob {

// One parameterized angle inside a circuit. The resolved angle is
//   base + theta[theta_index] + x[data_index]
// with absent indices (-1) contributing nothing. Slots appear in
// execution order; for an SU2 gate that order is lambda, theta, phi
// (the order its native Rz rotations fire in).
struct SlotBinding {
    int gate = 0;         // index into Circuit::gates
    int angle = 0;        // which angle of that gate (0=theta/Rx/Rz angle, 1=phi, 2=lambda)
    double base = 0.0;
    int theta_index = -1;
    int data_index = -1;
};

struct Circuit {
    int num_qubits = 0;
    std::vector<Gate> gates;         // angles here are placeholders until resolved
    std::vector<SlotBinding> slots;  // execution order
    int num_params = 0;              // P: size of theta
    int num_features = 0;            // d: size of x

    // Each theta index in [0, P) and each data index in [0, d) must be bound
    // exactly once, slot targets must exist. Throws on violation.
    void validate() const;

    // Materializes gate angles for a concrete (theta, x).
    std::vector<Gate> resolve(std::span<const double> theta,
                              std::span<const double> x) const;
};

// Executes the circuit on |0...0> and returns the final state.
StateVector run_circuit(const Circuit& c, std::span<const double> theta,
                        std::span<const double> x);

}  // namespace qrob
