#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "qrob/dataset.hpp"
#include "qrob/train.hpp"

namespace qrob {

// Classical feedforward baseline: input -> hidden ReLU -> single sigmoid
// output read as P(class 1). Consumes raw unit-range pixels, not the
// angle-scaled features the quantum models see.
struct FnnModel {
    int input_dim = 0;
    int hidden_dim = 0;
    std::vector<double> w1;  // hidden_dim x input_dim, row-major
    std::vector<double> b1;  // hidden_dim
    std::vector<double> w2;  // hidden_dim
    double b2 = 0.0;

    int param_count() const {
        return input_dim * hidden_dim + hidden_dim + hidden_dim + 1;
    }
};

// Uniform [-1/sqrt(fan_in), 1/sqrt(fan_in)) per layer, from the root seed's
// "fnn-init" substream.
FnnModel init_fnn(int input_dim, int hidden_dim, std::uint64_t seed);

double fnn_forward(const FnnModel& m, std::span<const double> x);

struct FnnGradient {
    double loss = 0.0;
    double p = 0.0;
    std::vector<double> dw1;
    std::vector<double> db1;
    std::vector<double> dw2;
    double db2 = 0.0;
    std::vector<double> dx;  // empty unless requested
};

// Cross-entropy loss and exact backprop gradients; dx enables FGSM.
FnnGradient fnn_loss_gradient(const FnnModel& m, std::span<const double> x, int label,
                              bool want_input_grad = false);

// Flat parameter order: w1, b1, w2, b2. Lets the baseline share the Adam
// implementation with the circuit trainer.
std::vector<double> fnn_pack(const FnnModel& m);
void fnn_unpack(FnnModel& m, std::span<const double> flat);

struct FnnTrainConfig {
    int epochs = 10;
    int batch_size = 100;
    double lr = 0.01;
    std::uint64_t seed = 1;
    double adversarial_mix = 0.0;
    int hidden_dim = 5;
};

struct FnnTrainResult {
    FnnModel model_final;
    FnnModel model_best;
    int best_epoch = 0;
    double best_test_acc = -1.0;
    double best_loss = 0.0;
    std::vector<EpochStats> history;
};

// Raw-pixel inputs: samples must carry raw_pixels. The adversarial set is
// cycled in per batch exactly like the circuit trainer's protocol.
FnnTrainResult fnn_train(const Dataset& data, const FnnTrainConfig& cfg,
                         const std::vector<Sample>& adversarial = {});

EvalStats fnn_evaluate(const FnnModel& m, std::span<const Sample> samples);

// All-ones-mask FGSM on raw pixels; the FNN's own feature range is [0, 1] so
// eps_hat needs no rescaling. Output samples carry perturbed raw_pixels and
// empty features: they are baseline-only and unusable by the circuit models.
std::vector<Sample> fnn_adversarial_set(const FnnModel& m,
                                        std::span<const Sample> samples,
                                        double eps_hat);

// Mean 1/(1+e^S) over the samples with S = (p_clean - p_adv)/eps_hat.
double fnn_adv_robustness(const FnnModel& m, std::span<const Sample> samples,
                          double eps_hat);

void save_fnn_checkpoint(const std::filesystem::path& path, const FnnTrainConfig& cfg,
                         const FnnTrainResult& res);

struct FnnCheckpoint {
    FnnTrainConfig config;
    FnnTrainResult result;
};
FnnCheckpoint load_fnn_checkpoint(const std::filesystem::path& path);

// One side of the quantum-vs-classical comparison: the score plus the
// protocol it was measured under.
struct RobustnessReport {
    double r_adv = 0.0;
    double eps_hat = 0.0;
    int num_samples = 0;
};

// Ratio of adversarial-robustness scores measured under the same protocol.
double robustness_ratio(const RobustnessReport& qnn, const RobustnessReport& fnn);

}  // namespace qrob
