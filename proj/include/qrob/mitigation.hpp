#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "qrob/rng.hpp"

namespace qrob {

// Default per-qubit readout fidelities (device-characterization medians).
inline constexpr double kReadoutF0 = 0.959;  // P(measure 0 | prepared 0)
inline constexpr double kReadoutF1 = 0.891;  // P(measure 1 | prepared 1)

// Row-stochastic readout assignment matrix: r[prep * dim + meas] is the
// probability of measuring outcome `meas` when `prep` was prepared.
struct AssignmentMatrix {
    int qubits = 0;
    std::vector<double> r;

    std::size_t dim() const { return std::size_t(1) << qubits; }
    double at(std::size_t prep, std::size_t meas) const { return r[prep * dim() + meas]; }
    double& at(std::size_t prep, std::size_t meas) { return r[prep * dim() + meas]; }
};

AssignmentMatrix identity_assignment(int qubits);
AssignmentMatrix single_qubit_assignment(double f0 = kReadoutF0, double f1 = kReadoutF1);

// Tensor product under a no-crosstalk assumption. `hi` acts on the more
// significant outcome bit, `lo` on the less significant one.
AssignmentMatrix tensor_assignment(const AssignmentMatrix& hi, const AssignmentMatrix& lo);

// w = R^T v: the distribution actually observed when the true outcome
// distribution is v.
std::vector<double> apply_assignment(std::span<const double> v, const AssignmentMatrix& R);

// Finite-shot forward model: draw `shots` samples from R^T true_dist.
std::vector<std::uint64_t> apply_readout_noise(std::span<const double> true_dist,
                                               const AssignmentMatrix& R,
                                               std::uint64_t shots, Rng& rng);

std::vector<double> counts_to_dist(std::span<const std::uint64_t> counts);

struct IbuResult {
    std::vector<double> v;  // unfolded estimate, on the simplex
    int iterations = 0;
    double delta = 0.0;  // max-abs change of v over the final iteration
};

// Iterative Bayesian unfolding of a measured distribution w through the
// assignment matrix. Starts from the uniform prior unless one is given.
IbuResult ibu_correct(std::span<const double> w, const AssignmentMatrix& R,
                      int max_iter = 50, std::span<const double> prior = {});

double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace qrob
