#pragma once
#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "qrob/noise.hpp"
#include "qrob/train.hpp"

namespace qrob {

// Resolved experiment configuration. Every field lands in the run manifest,
// and parsing the manifest's config block back reproduces the run bit for
// bit. Unset fields take task-specific defaults during parsing.
struct DatasetPrepConfig {
    std::string source = "synthetic";  // "synthetic" or "idx" (letter images)
    int per_class = 0;                 // 0 resolves to the task default
    int test_total = 100;
    std::string images;  // IDX paths, image source only
    std::string labels;
};

struct AttackStageConfig {
    double mask_fraction = 0.15;
    bool lcei_window_mask = true;  // cluster task: fixed central window
    double eps_hat = 0.1;          // strength for the adversarial set
    double eps_hat_max = 1.0;      // sweep grid [0, max]
    int eps_hat_points = 21;
    bool with_infidelity = true;
};

struct ReportStageConfig {
    int num_samples = 200;  // attack protocol size, capped at the test split
    double critical_fraction = 0.2;
    double rmse_gate = 0.1;
    std::string compare_with;  // optional path to another run's report.json
};

struct RunConfig {
    std::string task = "lcei";  // "lcei", "emnist" or "fnn"
    std::string profile = "desk-12q";
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "runs/out";
    DatasetPrepConfig dataset;
    TrainConfig train;  // lr/batch/epochs resolve per task when absent
    bool resume = false;
    int fnn_hidden = 5;
    AttackStageConfig attack;
    NoiseParams noise;
    ReportStageConfig report;
};

// Strict parser: unknown or mistyped fields abort naming the dotted path.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Full resolved round-trippable form, embedded in every stage manifest.
nlohmann::ordered_json run_config_to_json(const RunConfig& cfg);

// Pipeline stages. Artifacts land under cfg.out_dir; each stage writes
// <stage>-manifest.json with the resolved config and input/output digests.
// All return 0; failures throw.
int cmd_prepare(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_attack(const RunConfig& cfg);
int cmd_report(const RunConfig& cfg);

// Argument-driven entry point used by the binary: subcommand + flags
// (--config, --seed, --profile, --out). Catches errors, returns exit code.
int cli_main(int argc, const char* const* argv);

}  // namespace qrob
