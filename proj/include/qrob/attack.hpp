#pragma once

#include <cstdint>
#include <vector>

#include "qrob/dataset.hpp"
#include "qrob/gradient.hpp"

namespace qrob {

// Binary perturbation support over input dimensions.
struct Mask {
    std::vector<std::uint8_t> bits;
    double fraction = 1.0;  // requested coverage; popcount() is the realized one

    int popcount() const;
    int dim() const { return static_cast<int>(bits.size()); }
};

Mask full_mask(int dim);

// Gradient concentration: fraction of the total |g| l1 mass captured by the
// top ceil(r * dim) components, sampled at r = k/dim for k = 0..dim, so the
// curve increments are exactly the sorted magnitudes (nondecreasing, concave).
struct GradientConcentration {
    std::vector<double> r;
    std::vector<double> captured;  // G_r / G
};

// Mean |dL/dx| over a set of samples; the mask-building statistic.
std::vector<double> average_abs_input_gradient(const Model& m, std::span<const double> theta,
                                               const std::vector<Sample>& samples,
                                               GradEngine engine);

struct MaskBuildResult {
    Mask mask;
    GradientConcentration curve;
};

// Ranks input dimensions by averaged gradient magnitude (ties broken by
// lower index) and keeps the top ceil(r * dim). Throws when every component
// is zero: there is nothing to rank.
MaskBuildResult build_mask(const std::vector<double>& avg_abs_grad, double r);

// Central-qubit default for the cluster task: round(0.4 n) contiguous ones
// starting at (n - k) / 2; at n = 20 that is qubits 7..14 (1-indexed Q7-Q14).
Mask lcei_default_mask(int num_qubits);

// x + eps * sign(g) on the mask support, untouched elsewhere. sign(0) = 0
// and there is no clipping.
std::vector<double> mask_fgsm(const std::vector<double>& x, const Mask& mask, double eps,
                              const std::vector<double>& grad);

struct AttackPoint {
    double eps_hat = 0.0;
    double p_correct = 0.0;   // probability assigned to the true class
    double infidelity = 0.0;  // output-qubit D(rho_clean, rho_adv), if requested
    bool correct = false;
};

struct AttackCurve {
    int sample_id = 0;
    int label = 0;
    std::vector<AttackPoint> points;
};

struct SweepResult {
    std::vector<double> eps_grid;
    std::vector<AttackCurve> curves;  // one per sample
    std::vector<double> accuracy;     // per grid point, over all samples
    bool has_infidelity = false;
};

// `points` values uniformly spaced over [lo, hi], endpoints included.
std::vector<double> uniform_grid(double lo, double hi, int points);

// Single-step semantics: the gradient is computed once per sample at the
// clean point, then replayed across the grid with eps = eps_hat * width.
// The grid must start at 0 and increase strictly; the first point therefore
// reports the clean prediction (and infidelity exactly 0).
SweepResult attack_sweep(const Model& m, std::span<const double> theta,
                         const std::vector<Sample>& samples, const Mask& mask,
                         const std::vector<double>& eps_hat_grid, double feature_width,
                         GradEngine engine, bool with_infidelity = false);

// One FGSM example per input sample at a single strength, labels kept.
// This is the adversarial-training pool generator.
std::vector<Sample> make_adversarial_set(const Model& m, std::span<const double> theta,
                                         const std::vector<Sample>& samples, const Mask& mask,
                                         double eps_hat, double feature_width,
                                         GradEngine engine);

}  // namespace qrob
