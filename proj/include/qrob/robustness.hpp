#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qrob/attack.hpp"
#include "qrob/cos2fit.hpp"

namespace qrob {

// S = (p_clean - p_adv) / eps_hat, probabilities of the correct class;
// positive when the attack moves the sample toward the boundary.
double sensitivity(double p_clean, double p_adv, double eps_hat);

// Per-sample logistic robustness score 1/(1 + e^S) in (0, 1).
double robustness_score(double s);

// Dataset mean of robustness_score over sensitivities.
double adv_robustness(std::span<const double> s_values);

// Pearson correlation; needs >= 3 points and nonzero variance on both sides.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct SensitivityRecord {
    int sample_id = 0;
    int label = 0;
    double p_clean = 0.0;   // correct-class probability, unperturbed
    double eps_hat = 0.0;   // point strength used for s_point
    double delta_p = 0.0;   // p_clean - p_adv at eps_hat
    double s_point = 0.0;   // delta_p / eps_hat
    double s_slope = 0.0;   // negative OLS slope of p(eps_hat) over the fit range
    double cosine_sim = 0.0;  // cos(perturbation, full input gradient)
};

struct SensitivityConfig {
    double eps_hat = 0.1;      // the point reading of S
    double slope_range = 0.3;  // linear fit over [0, slope_range]
    int slope_points = 7;      // grid size for the fit, including 0
    GradEngine engine = GradEngine::Adjoint;
};

// Mask FGSM response of every sample: one full input gradient at the clean
// point, the perturbation replayed at eps_hat and across the slope grid.
// Both the point and slope readings of S are recorded.
std::vector<SensitivityRecord> sensitivity_records(const Model& m,
                                                   std::span<const double> theta,
                                                   const std::vector<Sample>& samples,
                                                   const Mask& mask, double feature_width,
                                                   const SensitivityConfig& cfg = {});

// Fidelity lower bound (p1 + p2 = 1 within 1e-9, p1 >= p2): no perturbed
// output state with infidelity below this can be classified differently.
double r_lb(double p1, double p2);

// Threshold fidelity sqrt(1 - r_lb(p1, p2)).
double v_star(double p1, double p2);

enum class BoundStatus {
    Ok,             // both fits converged and the 0.5 crossing is in range
    Misclassified,  // clean prediction wrong; the bound is undefined
    NoCrossing,     // p(eps_hat) never reaches 0.5 in the swept range
    FitFailed,      // a fit did not converge / residual too large / ordering broken
};
const char* to_string(BoundStatus s);

struct BoundRecord {
    int sample_id = 0;
    int label = 0;
    double p1 = 0.0;  // correct-class probability at eps_hat = 0
    double p2 = 0.0;
    double lb = 0.0;        // r_lb(p1, p2); meaningless when Misclassified
    CosSqFit p_fit, d_fit;  // p(eps_hat) and D(eps_hat) fits
    double eps_star = 0.0;  // smallest crossing p_fit = 0.5; Ok only
    double ub = 0.0;        // d_fit(eps_star), clamped at 0; Ok only
    BoundStatus status = BoundStatus::FitFailed;
};

// Per-sample bound extraction from a sweep recorded with infidelities.
// rmse_gate flags fits that track the data too loosely; an upper bound below
// the lower bound by more than the fit residuals is demoted to FitFailed
// rather than silently kept.
std::vector<BoundRecord> extract_bounds(const SweepResult& sweep, double rmse_gate = 0.1);

// Lowest-lb `fraction` of records with a defined bound, ties broken by
// sample id; floor(fraction * n), at least one.
std::vector<BoundRecord> critical_samples(const std::vector<BoundRecord>& records,
                                          double fraction = 0.2);

struct SoundnessResult {
    int qualifying = 0;  // perturbations with output infidelity < lb
    int violations = 0;  // among qualifying: classification changed
    double lb = 0.0;
};

// Brute-force check of the lower bound on one correctly classified sample:
// `trials` random input-space directions, each bisected to a magnitude whose
// output-qubit infidelity sits just below lb, then the classification is
// asserted unchanged. Randomness comes from the "attack-oracle" substream of
// `seed`, indexed by the sample id.
SoundnessResult verify_lb_soundness(const Model& m, std::span<const double> theta,
                                    const Sample& sample, int trials, std::uint64_t seed);

}  // namespace qrob
