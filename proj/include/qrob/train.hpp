#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>

#include "qrob/adam.hpp"
#include "qrob/dataset.hpp"
#include "qrob/gradient.hpp"

namespace qrob {

struct TrainConfig {
    int epochs = 50;
    int batch_size = 50;
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 1;
    GradEngine engine = GradEngine::Adjoint;
    // Fraction of every batch drawn from the adversarial set; 0 trains on
    // legitimate data only, 0.5 gives the ceil/floor half-and-half split.
    double adversarial_mix = 0.0;
    // Early-stop thresholds; a run stops once every enabled (> 0) target is
    // met. Disabled by default.
    double target_train_accuracy = -1.0;
    double target_test_accuracy = -1.0;
    int log_every = 0;  // progress line every k epochs; 0 keeps quiet

    AdamConfig adam() const { return {lr, beta1, beta2, eps}; }
};

struct EpochStats {
    int epoch = 0;       // 1-based
    double loss = 0.0;   // mean train-set cross-entropy at end of epoch
    double train_acc = 0.0;
    double test_acc = 0.0;
    // Accuracy on the adversarial set; NaN when the run does not mix.
    double adv_acc = std::numeric_limits<double>::quiet_NaN();
};

struct EvalStats {
    double loss = 0.0;
    double accuracy = 0.0;
};

struct TrainResult {
    std::vector<double> theta_final;  // after the last epoch run
    std::vector<double> theta_best;   // best-test-accuracy checkpoint
    int best_epoch = 0;
    double best_test_acc = -1.0;
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<EpochStats> history;  // one entry per epoch actually run
    AdamState adam;                   // optimizer state after the last epoch
    int epochs_run = 0;
    bool reached_targets = false;     // an enabled early-stop target fired
};

// Batch composition used by both trainers: floor(mix * batch_size)
// adversarial samples per batch, the rest legitimate; an epoch covers the
// training set once, ceil(n_train / legit_per_batch) batches (or
// ceil(n_train / batch_size) in the fully adversarial corner).
struct BatchPlan {
    int legit_per_batch = 0;
    int adv_per_batch = 0;
    int num_batches = 0;
};
BatchPlan batch_plan(int n_train, int batch_size, double adversarial_mix);

// Initial trainable angles, uniform on [-pi, pi) from the "init" substream.
std::vector<double> init_theta(const Model& m, std::uint64_t seed);

// Mean cross-entropy and accuracy over a sample set.
EvalStats evaluate(const Model& m, std::span<const double> theta,
                   const std::vector<Sample>& samples);

// Mini-batch Adam on the legitimate training set. Epoch = one pass over the
// (shuffled) training set without replacement; the batch gradient is the mean
// of per-sample gradients; the checkpoint with the best test accuracy is kept
// (ties broken by lower loss). Non-finite loss aborts with a diagnostic.
TrainResult train_clean(const Model& m, const Dataset& data, const TrainConfig& cfg);

// Same loop with mixed batches: batch_size - floor(mix * batch_size)
// legitimate samples plus floor(mix * batch_size) samples cycled from the
// adversarial set (reshuffled on wraparound). History rows gain adv_acc.
TrainResult train_adversarial(const Model& m, const Dataset& data,
                              const std::vector<Sample>& adv_set,
                              const TrainConfig& cfg);

// Continue an earlier run up to total_epochs. Batch composition is drawn
// from per-epoch substreams of the root seed, so the continuation matches
// bit for bit what one uninterrupted run of total_epochs would produce.
TrainResult resume_training(const Model& m, const Dataset& data,
                            const std::vector<Sample>& adv_set,
                            const TrainConfig& cfg, const TrainResult& from,
                            int total_epochs);

struct Checkpoint {
    ModelSpec spec;
    TrainConfig config;
    TrainResult result;
};

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec,
                     const TrainConfig& cfg, const TrainResult& res);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace qrob
