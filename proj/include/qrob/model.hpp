#pragma once

#include <string>
#include <string_view>

#include "qrob/circuit.hpp"

namespace qrob {

// Reconstruction recipe for a classifier circuit; this is what gets
// serialized, the gate list is rebuilt from it.
struct ModelSpec {
    std::string task;             // "emnist" or "lcei"
    int num_qubits = 0;
    std::vector<int> block_sizes; // one SU2 layer + CZ brickwork per entry
    int num_features = 0;         // encoded data slots (EMNIST: pixels, LCEI: qubits)
};

struct Model {
    ModelSpec spec;
    Circuit circuit;
    int output_qubit = 0;

    int num_params() const { return circuit.num_params; }
    int num_features() const { return circuit.num_features; }
};

// Variational ansatz shared by both tasks: for each block size b, one layer
// of SU2 gates on the b qubits centered in the register (offset (n-b)/2),
// then one CZ brickwork pass over that span (pairs starting at even span
// offsets, then odd ones), and a single trailable Rx on the output qubit
// floor(n/2) at the end. Parameter count P = 3 * sum(block_sizes) + 1.

// Image classifier: SU2 angle slots are enumerated in circuit order and the
// first `num_features` of them are encoded as theta_i + x_i; every slot keeps
// its trainable part.
Model build_emnist_model(int num_qubits, const std::vector<int>& block_sizes,
                         int num_features);

// Cluster-state excitation classifier: prepends H on every qubit (as fixed
// SU2 gates), the CZ chain 0-1, 1-2, ..., and one data-only Rx(alpha_q) per
// qubit; the variational part is fully trainable (num_features = num_qubits).
Model build_lcei_model(int num_qubits, const std::vector<int>& block_sizes);

// Just the preparation stage of the LCEI model: H everywhere, CZ chain,
// data-only Rx(alpha_q). With alpha = 0 the output is the linear cluster
// state (up to global phase, since H lives inside SU(2) only up to phase).
Circuit lcei_prep_circuit(int num_qubits);

Model build_model(const ModelSpec& spec);

// Output convention: p = (<sigma_z> + 1)/2 is the population of |0> on the
// output qubit and is read as the model's probability for class 1.
struct Prediction {
    double expectation = 0.0;  // <sigma_z>
    double p = 0.0;            // probability of class 1
    int label_hat = 0;
};

Prediction predict(const Model& m, std::span<const double> theta,
                   std::span<const double> x);

// Probability the model assigns to the true class.
inline double p_correct(double p, int label) { return label == 1 ? p : 1.0 - p; }

// p exactly 0.5 sits on the decision boundary and counts as wrong.
inline bool is_correct(double p, int label) { return p_correct(p, label) > 0.5; }

// Binary cross-entropy -[c ln p + (1-c) ln(1-p)] with p clamped away from
// {0,1} by 1e-12.
double cross_entropy(double p, int label);
// dL/dp at the same clamped point.
double cross_entropy_dp(double p, int label);

// Named presets. "desk-12q" is sized for commodity hardware, "full-20q"
// mirrors the reported large-scale setup.
struct EmnistProfile {
    std::string name;
    int num_qubits;
    std::vector<int> block_sizes;
    int image_size;   // images are resized to image_size x image_size
    int window;       // central window edge; num_features = window^2
    int num_features() const { return window * window; }
};

struct LceiProfile {
    std::string name;
    int num_qubits;
    std::vector<int> block_sizes;
};

EmnistProfile emnist_profile(std::string_view name);
LceiProfile lcei_profile(std::string_view name);

}  // namespace qrob
