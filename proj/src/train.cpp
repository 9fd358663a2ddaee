#include "qrob/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qrob/fsio.hpp"
#include "qrob/parallel.hpp"
#include "qrob/rng.hpp"

namespace qrob {
namespace {

constexpr double kPi = 3.14159265358979323846;

void check_config(const TrainConfig& cfg) {
    if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (cfg.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
    if (cfg.adversarial_mix < 0.0 || cfg.adversarial_mix > 1.0)
        throw std::invalid_argument("train: adversarial_mix must lie in [0, 1]");
}

// Cycles through the adversarial set in a per-epoch shuffled order,
// reshuffling whenever the set is exhausted.
class AdvStream {
public:
    AdvStream(const std::vector<Sample>& set, Rng rng) : set_(set), rng_(std::move(rng)) {}

    const Sample& next() {
        if (pos_ == order_.size()) {
            order_.resize(set_.size());
            std::iota(order_.begin(), order_.end(), 0);
            rng_.shuffle(order_);
            pos_ = 0;
        }
        return set_[order_[pos_++]];
    }

private:
    const std::vector<Sample>& set_;
    Rng rng_;
    std::vector<int> order_;
    std::size_t pos_ = 0;
};

// Shared epoch loop. `state` carries theta_final/adam/history from a previous
// call when resuming; epochs first..last (1-based, inclusive) are run on top.
TrainResult train_range(const Model& m, const Dataset& data,
                        const std::vector<Sample>& adv_set, const TrainConfig& cfg,
                        TrainResult state, int first_epoch, int last_epoch) {
    check_config(cfg);
    if (data.train.empty() || data.test.empty())
        throw std::invalid_argument("train: dataset must have train and test samples");

    const int n_train = static_cast<int>(data.train.size());
    const BatchPlan plan = batch_plan(n_train, cfg.batch_size, cfg.adversarial_mix);
    const int adv_per_batch = plan.adv_per_batch;
    const int legit_per_batch = plan.legit_per_batch;
    const int num_batches = plan.num_batches;
    if (adv_per_batch > 0 && adv_set.empty())
        throw std::invalid_argument("train: adversarial mixing needs a nonempty adversarial set");
    const int P = m.num_params();

    std::vector<double> theta = state.theta_final;
    if (static_cast<int>(theta.size()) != P)
        throw std::invalid_argument("train: theta size does not match the model");
    AdamState adam = state.adam;

    std::vector<int> order(n_train);
    std::vector<const Sample*> batch;
    std::vector<double> grad(P);

    for (int epoch = first_epoch; epoch <= last_epoch; ++epoch) {
        Rng batch_rng = Rng::substream(cfg.seed, "batch", static_cast<std::uint64_t>(epoch));
        std::iota(order.begin(), order.end(), 0);
        batch_rng.shuffle(order);
        AdvStream adv(adv_set,
                      Rng::substream(cfg.seed, "batch-adv", static_cast<std::uint64_t>(epoch)));

        for (int b = 0; b < num_batches; ++b) {
            batch.clear();
            if (legit_per_batch > 0) {
                const int lo = b * legit_per_batch;
                const int hi = std::min(lo + legit_per_batch, n_train);
                for (int i = lo; i < hi; ++i) batch.push_back(&data.train[order[i]]);
            }
            for (int i = 0; i < adv_per_batch; ++i) batch.push_back(&adv.next());

            std::fill(grad.begin(), grad.end(), 0.0);
            for (const Sample* s : batch) {
                LossGradient lg = loss_gradient(m, theta, s->features, s->label, cfg.engine);
                for (int i = 0; i < P; ++i) grad[i] += lg.dtheta[i];
            }
            const double inv = 1.0 / static_cast<double>(batch.size());
            for (double& g : grad) g *= inv;
            adam.step(theta, grad);
        }

        EvalStats tr = evaluate(m, theta, data.train);
        EvalStats te = evaluate(m, theta, data.test);
        EpochStats es;
        es.epoch = epoch;
        es.loss = tr.loss;
        es.train_acc = tr.accuracy;
        es.test_acc = te.accuracy;
        if (adv_per_batch > 0) es.adv_acc = evaluate(m, theta, adv_set).accuracy;

        if (!std::isfinite(es.loss))
            throw std::runtime_error("train: diverged (non-finite loss) at epoch " +
                                     std::to_string(epoch));

        state.history.push_back(es);
        state.epochs_run = epoch;
        if (es.test_acc > state.best_test_acc ||
            (es.test_acc == state.best_test_acc && es.loss < state.best_loss)) {
            state.best_test_acc = es.test_acc;
            state.best_loss = es.loss;
            state.best_epoch = epoch;
            state.theta_best = theta;
        }

        if (cfg.log_every > 0 && (epoch % cfg.log_every == 0 || epoch == last_epoch)) {
            std::printf("epoch %3d  loss %.4f  train %.3f  test %.3f", epoch, es.loss,
                        es.train_acc, es.test_acc);
            if (adv_per_batch > 0) std::printf("  adv %.3f", es.adv_acc);
            std::printf("\n");
            std::fflush(stdout);
        }

        const bool has_targets = cfg.target_train_accuracy > 0.0 || cfg.target_test_accuracy > 0.0;
        const bool train_ok =
            cfg.target_train_accuracy <= 0.0 || tr.accuracy >= cfg.target_train_accuracy;
        const bool test_ok =
            cfg.target_test_accuracy <= 0.0 || te.accuracy >= cfg.target_test_accuracy;
        if (has_targets && train_ok && test_ok) {
            state.reached_targets = true;
            break;
        }
    }

    state.theta_final = std::move(theta);
    state.adam = std::move(adam);
    return state;
}

TrainResult fresh_state(const Model& m, const TrainConfig& cfg) {
    TrainResult state;
    state.theta_final = init_theta(m, cfg.seed);
    state.adam = AdamState(m.num_params(), cfg.adam());
    return state;
}

nlohmann::ordered_json stats_to_json(const EpochStats& e) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["loss"] = e.loss;
    j["train_acc"] = e.train_acc;
    j["test_acc"] = e.test_acc;
    if (std::isfinite(e.adv_acc)) j["adv_acc"] = e.adv_acc;
    return j;
}

EpochStats stats_from_json(const nlohmann::json& j) {
    EpochStats e;
    e.epoch = j.at("epoch").get<int>();
    e.loss = j.at("loss").get<double>();
    e.train_acc = j.at("train_acc").get<double>();
    e.test_acc = j.at("test_acc").get<double>();
    if (j.contains("adv_acc")) e.adv_acc = j.at("adv_acc").get<double>();
    return e;
}

}  // namespace

BatchPlan batch_plan(int n_train, int batch_size, double adversarial_mix) {
    BatchPlan plan;
    plan.adv_per_batch = static_cast<int>(std::floor(adversarial_mix * batch_size));
    plan.legit_per_batch = batch_size - plan.adv_per_batch;
    // An epoch is one pass over the legitimate set. With a fully adversarial
    // mix that definition degenerates; keep ceil(N / B) batches there.
    const int stride = plan.legit_per_batch > 0 ? plan.legit_per_batch : batch_size;
    plan.num_batches = (n_train + stride - 1) / stride;
    return plan;
}

std::vector<double> init_theta(const Model& m, std::uint64_t seed) {
    Rng rng = Rng::substream(seed, "init");
    std::vector<double> theta(static_cast<std::size_t>(m.num_params()));
    for (double& t : theta) t = rng.uniform(-kPi, kPi);
    return theta;
}

EvalStats evaluate(const Model& m, std::span<const double> theta,
                   const std::vector<Sample>& samples) {
    if (samples.empty()) throw std::invalid_argument("evaluate: empty sample set");
    double loss = 0.0;
    int correct = 0;
    for (const Sample& s : samples) {
        Prediction pr = predict(m, theta, s.features);
        loss += cross_entropy(pr.p, s.label);
        if (is_correct(pr.p, s.label)) ++correct;
    }
    const double n = static_cast<double>(samples.size());
    return {loss / n, static_cast<double>(correct) / n};
}

TrainResult train_clean(const Model& m, const Dataset& data, const TrainConfig& cfg) {
    TrainConfig clean = cfg;
    clean.adversarial_mix = 0.0;
    return train_range(m, data, {}, clean, fresh_state(m, clean), 1, clean.epochs);
}

TrainResult train_adversarial(const Model& m, const Dataset& data,
                              const std::vector<Sample>& adv_set, const TrainConfig& cfg) {
    return train_range(m, data, adv_set, cfg, fresh_state(m, cfg), 1, cfg.epochs);
}

TrainResult resume_training(const Model& m, const Dataset& data,
                            const std::vector<Sample>& adv_set, const TrainConfig& cfg,
                            const TrainResult& from, int total_epochs) {
    if (total_epochs <= from.epochs_run)
        throw std::invalid_argument("resume: total_epochs must exceed the epochs already run");
    return train_range(m, data, adv_set, cfg, from, from.epochs_run + 1, total_epochs);
}

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec,
                     const TrainConfig& cfg, const TrainResult& res) {
    nlohmann::ordered_json j;
    j["format"] = "qrobust-checkpoint-v1";
    j["model"]["task"] = spec.task;
    j["model"]["num_qubits"] = spec.num_qubits;
    j["model"]["block_sizes"] = spec.block_sizes;
    j["model"]["num_features"] = spec.num_features;
    j["config"]["epochs"] = cfg.epochs;
    j["config"]["batch_size"] = cfg.batch_size;
    j["config"]["lr"] = cfg.lr;
    j["config"]["beta1"] = cfg.beta1;
    j["config"]["beta2"] = cfg.beta2;
    j["config"]["eps"] = cfg.eps;
    j["config"]["seed"] = cfg.seed;
    j["config"]["engine"] = to_string(cfg.engine);
    j["config"]["adversarial_mix"] = cfg.adversarial_mix;
    j["config"]["target_train_accuracy"] = cfg.target_train_accuracy;
    j["config"]["target_test_accuracy"] = cfg.target_test_accuracy;
    j["theta_final"] = res.theta_final;
    j["theta_best"] = res.theta_best;
    j["best_epoch"] = res.best_epoch;
    j["best_test_acc"] = res.best_test_acc;
    j["best_loss"] = res.best_loss;
    j["epochs_run"] = res.epochs_run;
    j["reached_targets"] = res.reached_targets;
    j["adam"]["t"] = res.adam.t;
    j["adam"]["m"] = res.adam.m;
    j["adam"]["v"] = res.adam.v;
    nlohmann::ordered_json hist = nlohmann::ordered_json::array();
    for (const EpochStats& e : res.history) hist.push_back(stats_to_json(e));
    j["history"] = std::move(hist);
    write_file(path, j.dump(1));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const nlohmann::json j = nlohmann::json::parse(read_file(path));
    if (j.at("format").get<std::string>() != "qrobust-checkpoint-v1")
        throw std::runtime_error("checkpoint: unknown format tag");
    Checkpoint ck;
    const auto& jm = j.at("model");
    ck.spec.task = jm.at("task").get<std::string>();
    ck.spec.num_qubits = jm.at("num_qubits").get<int>();
    ck.spec.block_sizes = jm.at("block_sizes").get<std::vector<int>>();
    ck.spec.num_features = jm.at("num_features").get<int>();
    const auto& jc = j.at("config");
    ck.config.epochs = jc.at("epochs").get<int>();
    ck.config.batch_size = jc.at("batch_size").get<int>();
    ck.config.lr = jc.at("lr").get<double>();
    ck.config.beta1 = jc.at("beta1").get<double>();
    ck.config.beta2 = jc.at("beta2").get<double>();
    ck.config.eps = jc.at("eps").get<double>();
    ck.config.seed = jc.at("seed").get<std::uint64_t>();
    ck.config.engine = grad_engine_from_string(jc.at("engine").get<std::string>());
    ck.config.adversarial_mix = jc.at("adversarial_mix").get<double>();
    ck.config.target_train_accuracy = jc.at("target_train_accuracy").get<double>();
    ck.config.target_test_accuracy = jc.at("target_test_accuracy").get<double>();
    ck.result.theta_final = j.at("theta_final").get<std::vector<double>>();
    ck.result.theta_best = j.at("theta_best").get<std::vector<double>>();
    ck.result.best_epoch = j.at("best_epoch").get<int>();
    ck.result.best_test_acc = j.at("best_test_acc").get<double>();
    // Non-finite doubles serialize as null; only best_loss can be one (a
    // zero-epoch result keeps its +inf sentinel).
    ck.result.best_loss = j.at("best_loss").is_null()
                              ? std::numeric_limits<double>::infinity()
                              : j.at("best_loss").get<double>();
    ck.result.epochs_run = j.at("epochs_run").get<int>();
    ck.result.reached_targets = j.at("reached_targets").get<bool>();
    ck.result.adam.cfg = ck.config.adam();
    ck.result.adam.t = j.at("adam").at("t").get<int>();
    ck.result.adam.m = j.at("adam").at("m").get<std::vector<double>>();
    ck.result.adam.v = j.at("adam").at("v").get<std::vector<double>>();
    for (const auto& je : j.at("history")) ck.result.history.push_back(stats_from_json(je));
    return ck;
}

}  // namespace qrob
