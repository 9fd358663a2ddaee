#include "qrob/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrob/attack.hpp"
#include "qrob/dataset.hpp"
#include "qrob/fnn.hpp"
#include "qrob/fsio.hpp"
#include "qrob/robustness.hpp"

namespace qrob {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: field '" + path + "' " + what);
}

// Strict object reader: every key must be consumed, mistakes name the path.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) config_fail(path_, "must be an object");
    }

    template <typename T>
    void read(const char* key, T& into, const char* type_name) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            into = it->get<T>();
        } catch (const json::exception&) {
            config_fail(path_ + "." + key, std::string("must be ") + type_name);
        }
    }

    const json* object(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                config_fail(path_.empty() ? item.key() : path_ + "." + item.key(),
                            "is not a recognized field");
    }

    std::string sub_path(const char* key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

// 300 letters per class minus the 100-sample test split gives the reference
// 500/100 protocol; the cluster task keeps 200/100.
int default_per_class(const std::string& task) { return task == "lcei" ? 150 : 300; }

void apply_task_defaults(RunConfig& cfg) {
    cfg.dataset.per_class = default_per_class(cfg.task);
    if (cfg.task == "lcei") {
        cfg.train.lr = 0.03;
        cfg.train.batch_size = 50;
        cfg.train.epochs = 50;
    } else if (cfg.task == "emnist") {
        cfg.train.lr = 0.1;
        cfg.train.batch_size = 100;
        cfg.train.epochs = 50;
    } else {  // fnn: same letters dataset, classical trainer defaults
        cfg.train.lr = 0.01;
        cfg.train.batch_size = 100;
        cfg.train.epochs = 10;
    }
}

void validate_run_config(const RunConfig& cfg) {
    if (cfg.task != "lcei" && cfg.task != "emnist" && cfg.task != "fnn")
        config_fail("task", "must be one of lcei, emnist, fnn");
    if (cfg.profile != "desk-12q" && cfg.profile != "full-20q")
        config_fail("profile", "must be desk-12q or full-20q");
    if (cfg.dataset.source != "synthetic" && cfg.dataset.source != "idx")
        config_fail("dataset.source", "must be synthetic or idx");
    if (cfg.dataset.per_class < 1) config_fail("dataset.per_class", "must be positive");
    if (cfg.dataset.test_total < 1) config_fail("dataset.test_total", "must be positive");
    if (cfg.train.epochs < 0) config_fail("train.epochs", "must not be negative");
    if (cfg.train.batch_size < 1) config_fail("train.batch_size", "must be positive");
    if (cfg.train.lr <= 0.0) config_fail("train.lr", "must be positive");
    if (cfg.train.adversarial_mix < 0.0 || cfg.train.adversarial_mix > 1.0)
        config_fail("train.adversarial_mix", "must lie in [0, 1]");
    if (cfg.out_dir.empty()) config_fail("out_dir", "must not be empty");
    if (cfg.attack.mask_fraction <= 0.0 || cfg.attack.mask_fraction > 1.0)
        config_fail("attack.mask_fraction", "must lie in (0, 1]");
    if (cfg.attack.eps_hat_points < 5)
        config_fail("attack.eps_hat_points", "must be at least 5 for the bound fits");
    if (cfg.attack.eps_hat <= 0.0)
        config_fail("attack.eps_hat", "must be positive");
    if (cfg.attack.eps_hat_max <= 0.0)
        config_fail("attack.eps_hat_max", "must be positive");
    if (cfg.report.num_samples < 1)
        config_fail("report.num_samples", "must be at least 1");
    if (cfg.report.critical_fraction <= 0.0 || cfg.report.critical_fraction > 1.0)
        config_fail("report.critical_fraction", "must lie in (0, 1]");
    if (cfg.fnn_hidden < 1) config_fail("fnn_hidden", "must be at least 1");
}

std::string digest_of(const fs::path& p) { return file_digest(p); }

void write_manifest(const RunConfig& cfg, const std::string& stage,
                    const std::vector<fs::path>& inputs,
                    const std::vector<fs::path>& outputs) {
    ordered_json j;
    j["format"] = "qrobust-manifest-v1";
    j["stage"] = stage;
    j["config"] = run_config_to_json(cfg);
    ordered_json in = ordered_json::object();
    for (const fs::path& p : inputs) in[p.filename().string()] = digest_of(p);
    ordered_json out = ordered_json::object();
    for (const fs::path& p : outputs) out[p.filename().string()] = digest_of(p);
    j["inputs"] = std::move(in);
    j["outputs"] = std::move(out);
    write_file(cfg.out_dir / (stage + "-manifest.json"), j.dump(1));
}

void require_artifacts(const std::string& stage, const std::vector<fs::path>& files) {
    std::vector<std::string> missing;
    for (const fs::path& p : files)
        if (!fs::exists(p)) missing.push_back(p.string());
    if (missing.empty()) return;
    std::string msg = stage + ": missing required inputs:";
    for (const std::string& m : missing) msg += "\n  " + m;
    throw std::runtime_error(msg);
}

Dataset prepare_dataset(const RunConfig& cfg) {
    if (cfg.task == "lcei")
        return make_lcei_dataset(lcei_profile(cfg.profile), cfg.seed,
                                 cfg.dataset.per_class, cfg.dataset.test_total);
    const EmnistProfile prof = emnist_profile(cfg.profile);
    if (cfg.dataset.source == "synthetic")
        return make_synthetic_emnist_dataset(prof, cfg.seed, cfg.dataset.per_class,
                                             cfg.dataset.test_total);
    const fs::path images = cfg.dataset.images;
    const fs::path labels = cfg.dataset.labels;
    if (!fs::exists(images) || !fs::exists(labels))
        throw std::runtime_error(
            "prepare: missing letter IDX files; expected images at '" + images.string() +
            "' and labels at '" + labels.string() +
            "' (set dataset.images / dataset.labels, or use dataset.source "
            "\"synthetic\")");
    return load_emnist_dataset(images, labels, prof, cfg.seed, cfg.dataset.per_class,
                               cfg.dataset.test_total);
}

int count_label(const std::vector<Sample>& v, int label) {
    return static_cast<int>(
        std::count_if(v.begin(), v.end(), [&](const Sample& s) { return s.label == label; }));
}

Model build_task_model(const RunConfig& cfg) {
    if (cfg.task == "lcei") {
        const LceiProfile p = lcei_profile(cfg.profile);
        return build_lcei_model(p.num_qubits, p.block_sizes);
    }
    const EmnistProfile p = emnist_profile(cfg.profile);
    return build_emnist_model(p.num_qubits, p.block_sizes, p.num_features());
}

void check_spec_match(const ModelSpec& ck, const Model& m, const std::string& stage) {
    if (ck.num_qubits != m.spec.num_qubits || ck.block_sizes != m.spec.block_sizes ||
        ck.num_features != m.spec.num_features)
        throw std::runtime_error(stage +
                                 ": checkpoint was trained with a different model spec; "
                                 "rerun with the matching task/profile");
}

fs::path dataset_path(const RunConfig& cfg) { return cfg.out_dir / "dataset.json"; }
fs::path adv_set_path(const RunConfig& cfg) { return cfg.out_dir / "adv-set.json"; }

fs::path checkpoint_path(const RunConfig& cfg, bool adversarial) {
    return cfg.out_dir / (adversarial ? "adv-checkpoint.json" : "clean-checkpoint.json");
}

fs::path history_path(const RunConfig& cfg, bool adversarial) {
    return cfg.out_dir / (adversarial ? "adv-history.csv" : "clean-history.csv");
}

void write_history_csv(const fs::path& path, const std::vector<EpochStats>& history) {
    std::string csv = "epoch,loss,train_acc,test_acc,adv_acc\n";
    char buf[192];
    for (const EpochStats& e : history) {
        if (std::isfinite(e.adv_acc))
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", e.epoch, e.loss,
                          e.train_acc, e.test_acc, e.adv_acc);
        else
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,\n", e.epoch, e.loss,
                          e.train_acc, e.test_acc);
        csv += buf;
    }
    write_file(path, csv);
}

std::vector<Sample> protocol_samples(const Dataset& ds, const RunConfig& cfg) {
    const std::size_t n =
        std::min<std::size_t>(ds.test.size(), static_cast<std::size_t>(cfg.report.num_samples));
    return {ds.test.begin(), ds.test.begin() + static_cast<std::ptrdiff_t>(n)};
}

// ---- attack artifacts --------------------------------------------------

void save_sweep(const fs::path& path, const SweepResult& sweep) {
    ordered_json j;
    j["format"] = "qrobust-sweep-v1";
    j["eps_grid"] = sweep.eps_grid;
    j["accuracy"] = sweep.accuracy;
    j["has_infidelity"] = sweep.has_infidelity;
    ordered_json curves = ordered_json::array();
    for (const AttackCurve& c : sweep.curves) {
        ordered_json jc;
        jc["sample_id"] = c.sample_id;
        jc["label"] = c.label;
        ordered_json pts = ordered_json::array();
        for (const AttackPoint& p : c.points) {
            ordered_json jp;
            jp["eps_hat"] = p.eps_hat;
            jp["p_correct"] = p.p_correct;
            if (sweep.has_infidelity) jp["infidelity"] = p.infidelity;
            jp["correct"] = p.correct;
            pts.push_back(std::move(jp));
        }
        jc["points"] = std::move(pts);
        curves.push_back(std::move(jc));
    }
    j["curves"] = std::move(curves);
    write_file(path, j.dump(1));
}

SweepResult load_sweep(const fs::path& path) {
    const json j = json::parse(read_file(path));
    if (j.at("format").get<std::string>() != "qrobust-sweep-v1")
        throw std::runtime_error("sweep: unknown format tag");
    SweepResult sweep;
    sweep.eps_grid = j.at("eps_grid").get<std::vector<double>>();
    sweep.accuracy = j.at("accuracy").get<std::vector<double>>();
    sweep.has_infidelity = j.at("has_infidelity").get<bool>();
    for (const auto& jc : j.at("curves")) {
        AttackCurve c;
        c.sample_id = jc.at("sample_id").get<int>();
        c.label = jc.at("label").get<int>();
        for (const auto& jp : jc.at("points")) {
            AttackPoint p;
            p.eps_hat = jp.at("eps_hat").get<double>();
            p.p_correct = jp.at("p_correct").get<double>();
            if (sweep.has_infidelity) p.infidelity = jp.at("infidelity").get<double>();
            p.correct = jp.at("correct").get<bool>();
            c.points.push_back(p);
        }
        sweep.curves.push_back(std::move(c));
    }
    return sweep;
}

void write_curves_csv(const fs::path& path, const SweepResult& sweep) {
    std::string csv = sweep.has_infidelity
                          ? "sample_id,label,eps_hat,p_correct,infidelity\n"
                          : "sample_id,label,eps_hat,p_correct\n";
    char buf[160];
    for (const AttackCurve& c : sweep.curves)
        for (const AttackPoint& p : c.points) {
            if (sweep.has_infidelity)
                std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", c.sample_id,
                              c.label, p.eps_hat, p.p_correct, p.infidelity);
            else
                std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", c.sample_id, c.label,
                              p.eps_hat, p.p_correct);
            csv += buf;
        }
    write_file(path, csv);
}

void write_accuracy_csv(const fs::path& path, const SweepResult& sweep) {
    std::string csv = "eps_hat,accuracy\n";
    char buf[96];
    for (std::size_t i = 0; i < sweep.eps_grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", sweep.eps_grid[i], sweep.accuracy[i]);
        csv += buf;
    }
    write_file(path, csv);
}

Mask build_attack_mask(const RunConfig& cfg, const Model& m,
                       const std::vector<double>& theta, const Dataset& ds,
                       MaskBuildResult* ranking_out) {
    if (cfg.task == "lcei" && cfg.attack.lcei_window_mask)
        return lcei_default_mask(lcei_profile(cfg.profile).num_qubits);
    const std::vector<double> avg =
        average_abs_input_gradient(m, theta, ds.train, cfg.train.engine);
    MaskBuildResult built = build_mask(avg, cfg.attack.mask_fraction);
    if (ranking_out) *ranking_out = built;
    return built.mask;
}

void save_mask(const fs::path& path, const Mask& mask, const MaskBuildResult* ranking) {
    ordered_json j;
    j["format"] = "qrobust-mask-v1";
    j["bits"] = mask.bits;
    j["fraction"] = mask.fraction;
    j["popcount"] = mask.popcount();
    if (ranking) {
        ordered_json curve;
        curve["r"] = ranking->curve.r;
        curve["captured"] = ranking->curve.captured;
        j["concentration"] = std::move(curve);
    }
    write_file(path, j.dump(1));
}

Mask load_mask(const fs::path& path) {
    const json j = json::parse(read_file(path));
    if (j.at("format").get<std::string>() != "qrobust-mask-v1")
        throw std::runtime_error("mask: unknown format tag");
    Mask m;
    m.bits = j.at("bits").get<std::vector<std::uint8_t>>();
    m.fraction = j.at("fraction").get<double>();
    return m;
}

// FNN sweep over raw pixels: same artifact shape, no infidelity column.
SweepResult fnn_attack_sweep(const FnnModel& m, std::span<const Sample> samples,
                             const std::vector<double>& grid) {
    SweepResult sweep;
    sweep.eps_grid = grid;
    sweep.has_infidelity = false;
    sweep.accuracy.assign(grid.size(), 0.0);
    const Mask mask = full_mask(m.input_dim);
    for (const Sample& s : samples) {
        const FnnGradient g = fnn_loss_gradient(m, s.raw_pixels, s.label, true);
        AttackCurve curve;
        curve.sample_id = s.id;
        curve.label = s.label;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const std::vector<double> adv = mask_fgsm(s.raw_pixels, mask, grid[k], g.dx);
            const double p = fnn_forward(m, adv);
            AttackPoint pt;
            pt.eps_hat = grid[k];
            pt.p_correct = p_correct(p, s.label);
            pt.correct = is_correct(p, s.label);
            if (pt.correct) sweep.accuracy[k] += 1.0;
            curve.points.push_back(pt);
        }
        sweep.curves.push_back(std::move(curve));
    }
    for (double& a : sweep.accuracy) a /= static_cast<double>(samples.size());
    return sweep;
}

// ---- report helpers ----------------------------------------------------

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Certified radius under a model: r_lb when correctly classified, zero
// otherwise (a misclassified sample has no radius to certify).
double lb_under_model(const Model& m, const std::vector<double>& theta, const Sample& s) {
    const double p = p_correct(predict(m, theta, s.features).p, s.label);
    return p > 0.5 ? r_lb(p, 1.0 - p) : 0.0;
}

void write_bounds_csv(const fs::path& path, const std::vector<BoundRecord>& records) {
    std::string csv = "sample_id,label,status,p1,lb,eps_star,ub,gap\n";
    char buf[224];
    for (const BoundRecord& r : records) {
        if (r.status == BoundStatus::Ok)
            std::snprintf(buf, sizeof buf, "%d,%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          r.sample_id, r.label, to_string(r.status), r.p1, r.lb, r.eps_star,
                          r.ub, r.ub - r.lb);
        else
            std::snprintf(buf, sizeof buf, "%d,%d,%s,%.17g,%.17g,,,\n", r.sample_id, r.label,
                          to_string(r.status), r.p1, r.lb);
        csv += buf;
    }
    write_file(path, csv);
}

void write_sensitivity_csv(const fs::path& path,
                           const std::vector<SensitivityRecord>& records) {
    std::string csv = "sample_id,label,p_clean,delta_p,s_point,s_slope,cosine_sim\n";
    char buf[224];
    for (const SensitivityRecord& r : records) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.sample_id,
                      r.label, r.p_clean, r.delta_p, r.s_point, r.s_slope, r.cosine_sim);
        csv += buf;
    }
    write_file(path, csv);
}

int cmd_report_qnn(const RunConfig& cfg);
int cmd_report_fnn(const RunConfig& cfg);

}  // namespace

RunConfig parse_run_config(const json& j) {
    RunConfig cfg;
    Section root(j, "");
    root.read("task", cfg.task, "a string");
    root.read("profile", cfg.profile, "a string");
    root.read("seed", cfg.seed, "an unsigned integer");
    std::string out = cfg.out_dir.string();
    root.read("out_dir", out, "a string");
    cfg.out_dir = out;
    if (cfg.task != "lcei" && cfg.task != "emnist" && cfg.task != "fnn")
        config_fail("task", "must be one of lcei, emnist, fnn");
    apply_task_defaults(cfg);

    if (const json* jd = root.object("dataset")) {
        Section sec(*jd, "dataset");
        sec.read("source", cfg.dataset.source, "a string");
        sec.read("per_class", cfg.dataset.per_class, "an integer");
        sec.read("test_total", cfg.dataset.test_total, "an integer");
        sec.read("images", cfg.dataset.images, "a string");
        sec.read("labels", cfg.dataset.labels, "a string");
        sec.finish();
        if (cfg.dataset.per_class == 0) cfg.dataset.per_class = default_per_class(cfg.task);
    }
    if (const json* jt = root.object("train")) {
        Section sec(*jt, "train");
        sec.read("epochs", cfg.train.epochs, "an integer");
        sec.read("batch_size", cfg.train.batch_size, "an integer");
        sec.read("lr", cfg.train.lr, "a number");
        sec.read("beta1", cfg.train.beta1, "a number");
        sec.read("beta2", cfg.train.beta2, "a number");
        sec.read("eps", cfg.train.eps, "a number");
        std::string engine = to_string(cfg.train.engine);
        sec.read("engine", engine, "a string");
        try {
            cfg.train.engine = grad_engine_from_string(engine);
        } catch (const std::exception&) {
            config_fail("train.engine", "must be psr or adjoint");
        }
        sec.read("adversarial_mix", cfg.train.adversarial_mix, "a number");
        sec.read("target_train_accuracy", cfg.train.target_train_accuracy, "a number");
        sec.read("target_test_accuracy", cfg.train.target_test_accuracy, "a number");
        sec.read("log_every", cfg.train.log_every, "an integer");
        sec.read("resume", cfg.resume, "a boolean");
        sec.finish();
    }
    root.read("fnn_hidden", cfg.fnn_hidden, "an integer");
    if (const json* ja = root.object("attack")) {
        Section sec(*ja, "attack");
        sec.read("mask_fraction", cfg.attack.mask_fraction, "a number");
        sec.read("lcei_window_mask", cfg.attack.lcei_window_mask, "a boolean");
        sec.read("eps_hat", cfg.attack.eps_hat, "a number");
        sec.read("eps_hat_max", cfg.attack.eps_hat_max, "a number");
        sec.read("eps_hat_points", cfg.attack.eps_hat_points, "an integer");
        sec.read("with_infidelity", cfg.attack.with_infidelity, "a boolean");
        sec.finish();
    }
    if (const json* jn = root.object("noise")) {
        Section sec(*jn, "noise");
        sec.read("t1", cfg.noise.t1, "a number");
        sec.read("t2", cfg.noise.t2, "a number");
        sec.read("t", cfg.noise.t, "a number");
        sec.finish();
    }
    if (const json* jr = root.object("report")) {
        Section sec(*jr, "report");
        sec.read("num_samples", cfg.report.num_samples, "an integer");
        sec.read("critical_fraction", cfg.report.critical_fraction, "a number");
        sec.read("rmse_gate", cfg.report.rmse_gate, "a number");
        sec.read("compare_with", cfg.report.compare_with, "a string");
        sec.finish();
    }
    root.finish();

    cfg.train.seed = cfg.seed;  // one root seed feeds every substream
    validate_run_config(cfg);
    return cfg;
}

RunConfig load_run_config(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: " + path.string() + " is not valid JSON: " +
                                    e.what());
    }
    return parse_run_config(j);
}

ordered_json run_config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["task"] = cfg.task;
    j["profile"] = cfg.profile;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir.string();
    j["dataset"]["source"] = cfg.dataset.source;
    j["dataset"]["per_class"] = cfg.dataset.per_class;
    j["dataset"]["test_total"] = cfg.dataset.test_total;
    j["dataset"]["images"] = cfg.dataset.images;
    j["dataset"]["labels"] = cfg.dataset.labels;
    j["train"]["epochs"] = cfg.train.epochs;
    j["train"]["batch_size"] = cfg.train.batch_size;
    j["train"]["lr"] = cfg.train.lr;
    j["train"]["beta1"] = cfg.train.beta1;
    j["train"]["beta2"] = cfg.train.beta2;
    j["train"]["eps"] = cfg.train.eps;
    j["train"]["engine"] = to_string(cfg.train.engine);
    j["train"]["adversarial_mix"] = cfg.train.adversarial_mix;
    j["train"]["target_train_accuracy"] = cfg.train.target_train_accuracy;
    j["train"]["target_test_accuracy"] = cfg.train.target_test_accuracy;
    j["train"]["log_every"] = cfg.train.log_every;
    j["train"]["resume"] = cfg.resume;
    j["fnn_hidden"] = cfg.fnn_hidden;
    j["attack"]["mask_fraction"] = cfg.attack.mask_fraction;
    j["attack"]["lcei_window_mask"] = cfg.attack.lcei_window_mask;
    j["attack"]["eps_hat"] = cfg.attack.eps_hat;
    j["attack"]["eps_hat_max"] = cfg.attack.eps_hat_max;
    j["attack"]["eps_hat_points"] = cfg.attack.eps_hat_points;
    j["attack"]["with_infidelity"] = cfg.attack.with_infidelity;
    j["noise"]["t1"] = cfg.noise.t1;
    j["noise"]["t2"] = cfg.noise.t2;
    j["noise"]["t"] = cfg.noise.t;
    j["report"]["num_samples"] = cfg.report.num_samples;
    j["report"]["critical_fraction"] = cfg.report.critical_fraction;
    j["report"]["rmse_gate"] = cfg.report.rmse_gate;
    j["report"]["compare_with"] = cfg.report.compare_with;
    return j;
}

int cmd_prepare(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const Dataset ds = prepare_dataset(cfg);
    save_dataset(ds, dataset_path(cfg));
    write_manifest(cfg, "prepare", {}, {dataset_path(cfg)});
    std::printf("prepared %s/%s: train %zu (class0 %d / class1 %d), test %zu "
                "(class0 %d / class1 %d), feature range [%g, %g]\n",
                ds.task.c_str(), ds.profile.c_str(), ds.train.size(),
                count_label(ds.train, 0), count_label(ds.train, 1), ds.test.size(),
                count_label(ds.test, 0), count_label(ds.test, 1), ds.x_min, ds.x_max);
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const bool adversarial = cfg.train.adversarial_mix > 0.0;
    std::vector<fs::path> inputs{dataset_path(cfg)};
    if (adversarial) inputs.push_back(adv_set_path(cfg));
    require_artifacts("train", inputs);
    const Dataset ds = load_dataset(dataset_path(cfg));

    const fs::path ck_path = checkpoint_path(cfg, adversarial);
    if (cfg.task == "fnn") {
        FnnTrainConfig fc;
        fc.epochs = cfg.train.epochs;
        fc.batch_size = cfg.train.batch_size;
        fc.lr = cfg.train.lr;
        fc.seed = cfg.seed;
        fc.adversarial_mix = cfg.train.adversarial_mix;
        fc.hidden_dim = cfg.fnn_hidden;
        std::vector<Sample> adv;
        if (adversarial) adv = load_dataset(adv_set_path(cfg)).train;
        const FnnTrainResult res = fnn_train(ds, fc, adv);
        save_fnn_checkpoint(ck_path, fc, res);
        write_history_csv(history_path(cfg, adversarial), res.history);
        write_manifest(cfg, adversarial ? "train-adv" : "train", inputs,
                       {ck_path, history_path(cfg, adversarial)});
        std::printf("trained fnn (%s): best test acc %.3f at epoch %d\n",
                    adversarial ? "adversarial" : "clean", res.best_test_acc,
                    res.best_epoch);
        return 0;
    }

    const Model m = build_task_model(cfg);
    std::vector<Sample> adv;
    if (adversarial) adv = load_dataset(adv_set_path(cfg)).train;

    TrainResult res;
    if (cfg.resume) {
        require_artifacts("train (resume)", {ck_path});
        const Checkpoint prev = load_checkpoint(ck_path);
        check_spec_match(prev.spec, m, "train (resume)");
        res = resume_training(m, ds, adv, cfg.train, prev.result, cfg.train.epochs);
    } else if (adversarial) {
        res = train_adversarial(m, ds, adv, cfg.train);
    } else {
        res = train_clean(m, ds, cfg.train);
    }
    save_checkpoint(ck_path, m.spec, cfg.train, res);
    write_history_csv(history_path(cfg, adversarial), res.history);
    write_manifest(cfg, adversarial ? "train-adv" : "train", inputs,
                   {ck_path, history_path(cfg, adversarial)});
    std::printf("trained %s (%s): best test acc %.3f at epoch %d (%d epochs run)\n",
                cfg.task.c_str(), adversarial ? "adversarial" : "clean",
                res.best_test_acc, res.best_epoch, res.epochs_run);
    return 0;
}

int cmd_attack(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const std::vector<fs::path> inputs{dataset_path(cfg), checkpoint_path(cfg, false)};
    require_artifacts("attack", inputs);
    const Dataset ds = load_dataset(dataset_path(cfg));
    const std::vector<double> grid =
        uniform_grid(0.0, cfg.attack.eps_hat_max, cfg.attack.eps_hat_points);
    const std::vector<Sample> targets = protocol_samples(ds, cfg);

    const fs::path sweep_path = cfg.out_dir / "attack-sweep.json";
    const fs::path curves_path = cfg.out_dir / "attack-curves.csv";
    const fs::path acc_path = cfg.out_dir / "attack-accuracy.csv";
    const fs::path mask_path = cfg.out_dir / "mask.json";

    SweepResult sweep;
    if (cfg.task == "fnn") {
        const FnnCheckpoint ck = load_fnn_checkpoint(checkpoint_path(cfg, false));
        const FnnModel& m = ck.result.model_best;
        sweep = fnn_attack_sweep(m, targets, grid);
        save_mask(mask_path, full_mask(m.input_dim), nullptr);
        Dataset adv = ds;
        adv.source = "adversarial";
        adv.train = fnn_adversarial_set(m, ds.train, cfg.attack.eps_hat);
        adv.test.clear();
        save_dataset(adv, adv_set_path(cfg));
    } else {
        const Checkpoint ck = load_checkpoint(checkpoint_path(cfg, false));
        const Model m = build_task_model(cfg);
        check_spec_match(ck.spec, m, "attack");
        const std::vector<double>& theta = ck.result.theta_best;
        MaskBuildResult ranking;
        const bool ranked = !(cfg.task == "lcei" && cfg.attack.lcei_window_mask);
        const Mask mask = build_attack_mask(cfg, m, theta, ds, &ranking);
        sweep = attack_sweep(m, theta, targets, mask, grid, ds.width(),
                             cfg.train.engine, cfg.attack.with_infidelity);
        save_mask(mask_path, mask, ranked ? &ranking : nullptr);
        Dataset adv = ds;
        adv.source = "adversarial";
        adv.train = make_adversarial_set(m, theta, ds.train, mask, cfg.attack.eps_hat,
                                         ds.width(), cfg.train.engine);
        adv.test.clear();
        save_dataset(adv, adv_set_path(cfg));
    }
    save_sweep(sweep_path, sweep);
    write_curves_csv(curves_path, sweep);
    write_accuracy_csv(acc_path, sweep);
    write_manifest(cfg, "attack", inputs,
                   {sweep_path, curves_path, acc_path, mask_path, adv_set_path(cfg)});
    std::printf("attack sweep over %zu samples: accuracy %.3f at eps_hat 0, %.3f at %g\n",
                sweep.curves.size(), sweep.accuracy.front(), sweep.accuracy.back(),
                grid.back());
    return 0;
}

namespace {

int cmd_report_qnn(const RunConfig& cfg) {
    const std::vector<fs::path> inputs{dataset_path(cfg), checkpoint_path(cfg, false),
                                       cfg.out_dir / "attack-sweep.json",
                                       cfg.out_dir / "mask.json",
                                       checkpoint_path(cfg, true)};
    require_artifacts("report", inputs);
    const Dataset ds = load_dataset(dataset_path(cfg));
    const Model m = build_task_model(cfg);
    const Checkpoint clean_ck = load_checkpoint(checkpoint_path(cfg, false));
    const Checkpoint adv_ck = load_checkpoint(checkpoint_path(cfg, true));
    check_spec_match(clean_ck.spec, m, "report");
    check_spec_match(adv_ck.spec, m, "report");
    const Mask mask = load_mask(cfg.out_dir / "mask.json");
    const std::vector<Sample> targets = protocol_samples(ds, cfg);

    SensitivityConfig scfg;
    scfg.eps_hat = cfg.attack.eps_hat;
    scfg.engine = cfg.train.engine;
    const std::vector<SensitivityRecord> sens_clean = sensitivity_records(
        m, clean_ck.result.theta_best, targets, mask, ds.width(), scfg);
    const std::vector<SensitivityRecord> sens_adv = sensitivity_records(
        m, adv_ck.result.theta_best, targets, mask, ds.width(), scfg);

    std::vector<double> s_clean, s_adv, s_noise;
    const double pop = population_factor(cfg.noise);
    for (const SensitivityRecord& r : sens_clean) {
        s_clean.push_back(r.s_point);
        s_noise.push_back(pop * r.s_point);
    }
    for (const SensitivityRecord& r : sens_adv) s_adv.push_back(r.s_point);
    const double r_clean = adv_robustness(s_clean);
    const double r_adv = adv_robustness(s_adv);
    const double r_noise = adv_robustness(s_noise);

    const SweepResult sweep = load_sweep(cfg.out_dir / "attack-sweep.json");
    const std::vector<BoundRecord> bounds = extract_bounds(sweep, cfg.report.rmse_gate);
    std::vector<double> gaps;
    int n_ok = 0;
    int ordering_violations = 0;
    for (const BoundRecord& b : bounds) {
        if (b.status != BoundStatus::Ok) continue;
        ++n_ok;
        gaps.push_back(b.ub - b.lb);
        if (b.ub < b.lb) ++ordering_violations;
    }
    double median_gap = std::numeric_limits<double>::quiet_NaN();
    if (!gaps.empty()) {
        std::sort(gaps.begin(), gaps.end());
        median_gap = gaps[gaps.size() / 2];
    }

    // critical samples: clean-model bottom slice by certified radius
    const std::vector<BoundRecord> critical =
        critical_samples(bounds, cfg.report.critical_fraction);
    std::map<int, const Sample*> by_id;
    for (const Sample& s : targets) by_id[s.id] = &s;
    std::vector<double> crit_clean, crit_adv;
    ordered_json crit_rows = ordered_json::array();
    for (const BoundRecord& b : critical) {
        const Sample* s = by_id.at(b.sample_id);
        const double lb_clean = lb_under_model(m, clean_ck.result.theta_best, *s);
        const double lb_adv = lb_under_model(m, adv_ck.result.theta_best, *s);
        crit_clean.push_back(lb_clean);
        crit_adv.push_back(lb_adv);
        ordered_json row;
        row["sample_id"] = b.sample_id;
        row["lb_clean"] = lb_clean;
        row["lb_adversarial"] = lb_adv;
        crit_rows.push_back(std::move(row));
    }

    ordered_json j;
    j["format"] = "qrobust-report-v1";
    j["task"] = cfg.task;
    j["profile"] = cfg.profile;
    j["seed"] = cfg.seed;
    j["protocol"]["eps_hat"] = cfg.attack.eps_hat;
    j["protocol"]["num_samples"] = static_cast<int>(targets.size());
    j["protocol"]["mask_popcount"] = mask.popcount();
    j["r_adv"]["clean"] = r_clean;
    j["r_adv"]["adversarial"] = r_adv;
    j["r_adv"]["relative_change"] = (r_adv - r_clean) / r_clean;
    j["noise"]["population_factor"] = pop;
    j["noise"]["coherence_factor"] = coherence_factor(cfg.noise);
    j["noise"]["r_adv_noise_scaled"] = r_noise;
    j["bounds"]["num_records"] = static_cast<int>(bounds.size());
    j["bounds"]["num_ok"] = n_ok;
    j["bounds"]["ordering_violations"] = ordering_violations;
    j["bounds"]["median_gap"] = median_gap;
    j["critical"]["num_samples"] = static_cast<int>(critical.size());
    j["critical"]["mean_lb_clean"] = crit_clean.empty() ? 0.0 : mean_of(crit_clean);
    j["critical"]["mean_lb_adversarial"] = crit_adv.empty() ? 0.0 : mean_of(crit_adv);
    j["critical"]["rows"] = std::move(crit_rows);

    if (!cfg.report.compare_with.empty()) {
        const json other = json::parse(read_file(cfg.report.compare_with));
        RobustnessReport mine{r_clean, cfg.attack.eps_hat,
                              static_cast<int>(targets.size())};
        RobustnessReport theirs{other.at("r_adv").at("clean").get<double>(),
                                other.at("protocol").at("eps_hat").get<double>(),
                                other.at("protocol").at("num_samples").get<int>()};
        j["compare"]["with"] = cfg.report.compare_with;
        j["compare"]["ratio_clean"] = robustness_ratio(mine, theirs);
        RobustnessReport mine_adv = mine;
        mine_adv.r_adv = r_adv;
        RobustnessReport theirs_adv = theirs;
        theirs_adv.r_adv = other.at("r_adv").at("adversarial").get<double>();
        j["compare"]["ratio_adversarial"] = robustness_ratio(mine_adv, theirs_adv);
    }

    const fs::path report_path = cfg.out_dir / "report.json";
    write_file(report_path, j.dump(1));
    write_bounds_csv(cfg.out_dir / "bounds.csv", bounds);
    write_sensitivity_csv(cfg.out_dir / "sensitivity-clean.csv", sens_clean);
    write_sensitivity_csv(cfg.out_dir / "sensitivity-adv.csv", sens_adv);
    write_manifest(cfg, "report", inputs,
                   {report_path, cfg.out_dir / "bounds.csv",
                    cfg.out_dir / "sensitivity-clean.csv",
                    cfg.out_dir / "sensitivity-adv.csv"});
    std::printf("report: r_adv %.4f -> %.4f (%+.1f%%), bounds ok %d/%zu, median gap %g\n",
                r_clean, r_adv, 100.0 * (r_adv - r_clean) / r_clean, n_ok, bounds.size(),
                median_gap);
    return 0;
}

int cmd_report_fnn(const RunConfig& cfg) {
    const std::vector<fs::path> inputs{dataset_path(cfg), checkpoint_path(cfg, false),
                                       checkpoint_path(cfg, true)};
    require_artifacts("report", inputs);
    const Dataset ds = load_dataset(dataset_path(cfg));
    const FnnCheckpoint clean_ck = load_fnn_checkpoint(checkpoint_path(cfg, false));
    const FnnCheckpoint adv_ck = load_fnn_checkpoint(checkpoint_path(cfg, true));
    const std::vector<Sample> targets = protocol_samples(ds, cfg);

    const double r_clean =
        fnn_adv_robustness(clean_ck.result.model_best, targets, cfg.attack.eps_hat);
    const double r_adv =
        fnn_adv_robustness(adv_ck.result.model_best, targets, cfg.attack.eps_hat);

    ordered_json j;
    j["format"] = "qrobust-report-v1";
    j["task"] = cfg.task;
    j["profile"] = cfg.profile;
    j["seed"] = cfg.seed;
    j["protocol"]["eps_hat"] = cfg.attack.eps_hat;
    j["protocol"]["num_samples"] = static_cast<int>(targets.size());
    j["protocol"]["mask_popcount"] = clean_ck.result.model_best.input_dim;
    j["r_adv"]["clean"] = r_clean;
    j["r_adv"]["adversarial"] = r_adv;
    j["r_adv"]["relative_change"] = (r_adv - r_clean) / r_clean;

    const fs::path report_path = cfg.out_dir / "report.json";
    write_file(report_path, j.dump(1));
    write_manifest(cfg, "report", inputs, {report_path});
    std::printf("report: fnn r_adv %.4f -> %.4f (%+.1f%%)\n", r_clean, r_adv,
                100.0 * (r_adv - r_clean) / r_clean);
    return 0;
}

}  // namespace

int cmd_report(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    return cfg.task == "fnn" ? cmd_report_fnn(cfg) : cmd_report_qnn(cfg);
}

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"quantum classifier robustness pipeline: prepare -> train -> "
                 "attack -> train (adversarial) -> report"};
    app.require_subcommand(1);

    std::string config_path, task, profile, out_dir;
    std::uint64_t seed = 0;
    double mix = 0.0;
    bool resume = false;
    const CLI::Option* config_opt =
        app.add_option("--config", config_path, "JSON config file (see README)");
    const CLI::Option* task_opt =
        app.add_option("--task", task, "task override: lcei, emnist or fnn");
    const CLI::Option* seed_opt = app.add_option("--seed", seed, "root seed override");
    const CLI::Option* profile_opt =
        app.add_option("--profile", profile, "profile override: desk-12q or full-20q");
    const CLI::Option* out_opt =
        app.add_option("--out", out_dir, "output directory override");

    CLI::App* prepare = app.add_subcommand("prepare", "generate and cache the dataset");
    CLI::App* train =
        app.add_subcommand("train", "train a classifier on the cached dataset");
    const CLI::Option* mix_opt = train->add_option(
        "--mix", mix, "adversarial batch fraction (> 0 trains the hardened model)");
    const CLI::Option* resume_opt = train->add_flag(
        "--resume", resume, "continue the existing checkpoint up to the epoch budget");
    CLI::App* attack =
        app.add_subcommand("attack", "masked FGSM sweep + adversarial set generation");
    CLI::App* report =
        app.add_subcommand("report", "aggregate robustness scores, bounds and tables");
    for (CLI::App* sub : {prepare, train, attack, report}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        json j = json::object();
        if (config_opt->count() > 0) {
            try {
                j = json::parse(read_file(config_path));
            } catch (const json::exception& e) {
                throw std::invalid_argument("config: " + config_path +
                                            " is not valid JSON: " + e.what());
            }
        }
        if (task_opt->count() > 0) j["task"] = task;
        if (seed_opt->count() > 0) j["seed"] = seed;
        if (profile_opt->count() > 0) j["profile"] = profile;
        if (out_opt->count() > 0) j["out_dir"] = out_dir;
        if (mix_opt->count() > 0) j["train"]["adversarial_mix"] = mix;
        if (resume_opt->count() > 0) j["train"]["resume"] = true;
        const RunConfig cfg = parse_run_config(j);
        if (prepare->parsed()) return cmd_prepare(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (attack->parsed()) return cmd_attack(cfg);
        return cmd_report(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace qrob
