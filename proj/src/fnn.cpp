#include "qrob/fnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qrob/attack.hpp"
#include "qrob/fsio.hpp"
#include "qrob/rng.hpp"
#include "qrob/robustness.hpp"

namespace qrob {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_input(const FnnModel& m, std::span<const double> x) {
    if (static_cast<int>(x.size()) != m.input_dim)
        throw std::invalid_argument("fnn: input has " + std::to_string(x.size()) +
                                    " pixels, model expects " +
                                    std::to_string(m.input_dim));
}

// Forward pass keeping the pieces backprop needs.
struct Trace {
    std::vector<double> z1;  // hidden pre-activations
    std::vector<double> h;   // ReLU outputs
    double p = 0.0;
};

Trace forward_trace(const FnnModel& m, std::span<const double> x) {
    check_input(m, x);
    Trace t;
    t.z1.resize(static_cast<std::size_t>(m.hidden_dim));
    t.h.resize(t.z1.size());
    for (int j = 0; j < m.hidden_dim; ++j) {
        double z = m.b1[static_cast<std::size_t>(j)];
        const double* row = &m.w1[static_cast<std::size_t>(j) * m.input_dim];
        for (int i = 0; i < m.input_dim; ++i) z += row[i] * x[static_cast<std::size_t>(i)];
        t.z1[static_cast<std::size_t>(j)] = z;
        t.h[static_cast<std::size_t>(j)] = z > 0.0 ? z : 0.0;
    }
    double z2 = m.b2;
    for (int j = 0; j < m.hidden_dim; ++j)
        z2 += m.w2[static_cast<std::size_t>(j)] * t.h[static_cast<std::size_t>(j)];
    t.p = sigmoid(z2);
    return t;
}

const std::vector<double>& pixels_of(const Sample& s) {
    if (s.raw_pixels.empty())
        throw std::invalid_argument("fnn: sample " + std::to_string(s.id) +
                                    " has no raw pixels");
    return s.raw_pixels;
}

}  // namespace

FnnModel init_fnn(int input_dim, int hidden_dim, std::uint64_t seed) {
    if (input_dim < 1 || hidden_dim < 1)
        throw std::invalid_argument("init_fnn: dimensions must be positive");
    Rng rng = Rng::substream(seed, "fnn-init");
    FnnModel m;
    m.input_dim = input_dim;
    m.hidden_dim = hidden_dim;
    const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    m.w1.resize(static_cast<std::size_t>(hidden_dim) * input_dim);
    m.b1.resize(static_cast<std::size_t>(hidden_dim));
    m.w2.resize(static_cast<std::size_t>(hidden_dim));
    for (double& w : m.w1) w = rng.uniform(-s1, s1);
    for (double& b : m.b1) b = rng.uniform(-s1, s1);
    for (double& w : m.w2) w = rng.uniform(-s2, s2);
    m.b2 = rng.uniform(-s2, s2);
    return m;
}

double fnn_forward(const FnnModel& m, std::span<const double> x) {
    return forward_trace(m, x).p;
}

FnnGradient fnn_loss_gradient(const FnnModel& m, std::span<const double> x, int label,
                              bool want_input_grad) {
    const Trace t = forward_trace(m, x);
    FnnGradient g;
    g.p = t.p;
    g.loss = cross_entropy(t.p, label);

    // dL/dz2 for sigmoid + cross entropy collapses to p - y
    const double dz2 = t.p - static_cast<double>(label);
    g.db2 = dz2;
    g.dw2.resize(t.h.size());
    for (std::size_t j = 0; j < t.h.size(); ++j) g.dw2[j] = dz2 * t.h[j];

    g.db1.resize(t.h.size());
    g.dw1.assign(m.w1.size(), 0.0);
    if (want_input_grad) g.dx.assign(x.size(), 0.0);
    for (int j = 0; j < m.hidden_dim; ++j) {
        const std::size_t ju = static_cast<std::size_t>(j);
        const double dz1 = t.z1[ju] > 0.0 ? dz2 * m.w2[ju] : 0.0;
        g.db1[ju] = dz1;
        if (dz1 == 0.0) continue;
        double* wrow = &g.dw1[ju * m.input_dim];
        const double* mrow = &m.w1[ju * m.input_dim];
        for (int i = 0; i < m.input_dim; ++i) {
            wrow[i] = dz1 * x[static_cast<std::size_t>(i)];
            if (want_input_grad) g.dx[static_cast<std::size_t>(i)] += dz1 * mrow[i];
        }
    }
    return g;
}

std::vector<double> fnn_pack(const FnnModel& m) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m.param_count()));
    flat.insert(flat.end(), m.w1.begin(), m.w1.end());
    flat.insert(flat.end(), m.b1.begin(), m.b1.end());
    flat.insert(flat.end(), m.w2.begin(), m.w2.end());
    flat.push_back(m.b2);
    return flat;
}

void fnn_unpack(FnnModel& m, std::span<const double> flat) {
    if (static_cast<int>(flat.size()) != m.param_count())
        throw std::invalid_argument("fnn_unpack: flat size mismatch");
    std::size_t k = 0;
    for (double& w : m.w1) w = flat[k++];
    for (double& b : m.b1) b = flat[k++];
    for (double& w : m.w2) w = flat[k++];
    m.b2 = flat[k];
}

EvalStats fnn_evaluate(const FnnModel& m, std::span<const Sample> samples) {
    if (samples.empty()) throw std::invalid_argument("fnn_evaluate: empty sample set");
    double loss = 0.0;
    int correct = 0;
    for (const Sample& s : samples) {
        const double p = fnn_forward(m, pixels_of(s));
        loss += cross_entropy(p, s.label);
        if (is_correct(p, s.label)) ++correct;
    }
    const double n = static_cast<double>(samples.size());
    return {loss / n, static_cast<double>(correct) / n};
}

FnnTrainResult fnn_train(const Dataset& data, const FnnTrainConfig& cfg,
                         const std::vector<Sample>& adversarial) {
    if (cfg.batch_size < 1) throw std::invalid_argument("fnn_train: batch_size must be >= 1");
    if (cfg.epochs < 0) throw std::invalid_argument("fnn_train: epochs must be >= 0");
    if (cfg.hidden_dim < 1) throw std::invalid_argument("fnn_train: hidden_dim must be >= 1");
    if (data.train.empty() || data.test.empty())
        throw std::invalid_argument("fnn_train: dataset must have train and test samples");

    const int n_train = static_cast<int>(data.train.size());
    const BatchPlan plan = batch_plan(n_train, cfg.batch_size, cfg.adversarial_mix);
    if (plan.adv_per_batch > 0 && adversarial.empty())
        throw std::invalid_argument("fnn_train: adversarial mixing needs a nonempty set");

    const int input_dim = static_cast<int>(pixels_of(data.train.front()).size());
    FnnTrainResult res;
    res.model_final = init_fnn(input_dim, cfg.hidden_dim, cfg.seed);
    res.best_loss = std::numeric_limits<double>::infinity();
    FnnModel& m = res.model_final;

    AdamConfig ac;
    ac.lr = cfg.lr;
    AdamState adam(m.param_count(), ac);
    std::vector<double> theta = fnn_pack(m);
    std::vector<double> grad(theta.size());

    std::vector<int> order(static_cast<std::size_t>(n_train));
    std::vector<const Sample*> batch;
    std::vector<int> adv_order;
    std::size_t adv_pos = 0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng batch_rng = Rng::substream(cfg.seed, "batch", static_cast<std::uint64_t>(epoch));
        std::iota(order.begin(), order.end(), 0);
        batch_rng.shuffle(order);
        Rng adv_rng = Rng::substream(cfg.seed, "batch-adv", static_cast<std::uint64_t>(epoch));
        adv_order.clear();
        adv_pos = 0;

        for (int b = 0; b < plan.num_batches; ++b) {
            batch.clear();
            if (plan.legit_per_batch > 0) {
                const int lo = b * plan.legit_per_batch;
                const int hi = std::min(lo + plan.legit_per_batch, n_train);
                for (int i = lo; i < hi; ++i)
                    batch.push_back(&data.train[static_cast<std::size_t>(order[i])]);
            }
            for (int i = 0; i < plan.adv_per_batch; ++i) {
                if (adv_pos == adv_order.size()) {
                    adv_order.resize(adversarial.size());
                    std::iota(adv_order.begin(), adv_order.end(), 0);
                    adv_rng.shuffle(adv_order);
                    adv_pos = 0;
                }
                batch.push_back(&adversarial[static_cast<std::size_t>(adv_order[adv_pos++])]);
            }

            std::fill(grad.begin(), grad.end(), 0.0);
            for (const Sample* s : batch) {
                const FnnGradient lg = fnn_loss_gradient(m, pixels_of(*s), s->label);
                std::size_t k = 0;
                for (double g : lg.dw1) grad[k++] += g;
                for (double g : lg.db1) grad[k++] += g;
                for (double g : lg.dw2) grad[k++] += g;
                grad[k] += lg.db2;
            }
            const double inv = 1.0 / static_cast<double>(batch.size());
            for (double& g : grad) g *= inv;
            adam.step(theta, grad);
            fnn_unpack(m, theta);
        }

        const EvalStats tr = fnn_evaluate(m, data.train);
        const EvalStats te = fnn_evaluate(m, data.test);
        EpochStats es;
        es.epoch = epoch;
        es.loss = tr.loss;
        es.train_acc = tr.accuracy;
        es.test_acc = te.accuracy;
        if (plan.adv_per_batch > 0) es.adv_acc = fnn_evaluate(m, adversarial).accuracy;

        if (!std::isfinite(es.loss))
            throw std::runtime_error("fnn_train: diverged (non-finite loss) at epoch " +
                                     std::to_string(epoch));

        res.history.push_back(es);
        if (es.test_acc > res.best_test_acc ||
            (es.test_acc == res.best_test_acc && es.loss < res.best_loss)) {
            res.best_test_acc = es.test_acc;
            res.best_loss = es.loss;
            res.best_epoch = epoch;
            res.model_best = m;
        }
    }
    if (res.best_epoch == 0) res.model_best = m;  // zero-epoch run
    return res;
}

std::vector<Sample> fnn_adversarial_set(const FnnModel& m, std::span<const Sample> samples,
                                        double eps_hat) {
    if (eps_hat < 0.0) throw std::invalid_argument("fnn_adversarial_set: negative strength");
    const Mask mask = full_mask(m.input_dim);
    std::vector<Sample> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) {
        const FnnGradient g = fnn_loss_gradient(m, pixels_of(s), s.label, true);
        Sample adv;
        adv.id = s.id;
        adv.label = s.label;
        adv.raw_pixels = mask_fgsm(pixels_of(s), mask, eps_hat, g.dx);
        out.push_back(std::move(adv));
    }
    return out;
}

double fnn_adv_robustness(const FnnModel& m, std::span<const Sample> samples,
                          double eps_hat) {
    if (samples.empty()) throw std::invalid_argument("fnn_adv_robustness: empty sample set");
    const std::vector<Sample> adv = fnn_adversarial_set(m, samples, eps_hat);
    std::vector<double> scores;
    scores.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double p_clean = p_correct(fnn_forward(m, pixels_of(samples[i])),
                                         samples[i].label);
        const double p_adv = p_correct(fnn_forward(m, adv[i].raw_pixels), adv[i].label);
        scores.push_back(sensitivity(p_clean, p_adv, eps_hat));
    }
    return adv_robustness(scores);
}

namespace {

nlohmann::ordered_json model_to_json(const FnnModel& m) {
    nlohmann::ordered_json j;
    j["input_dim"] = m.input_dim;
    j["hidden_dim"] = m.hidden_dim;
    j["params"] = fnn_pack(m);
    return j;
}

FnnModel model_from_json(const nlohmann::json& j) {
    FnnModel m;
    m.input_dim = j.at("input_dim").get<int>();
    m.hidden_dim = j.at("hidden_dim").get<int>();
    m.w1.resize(static_cast<std::size_t>(m.hidden_dim) * m.input_dim);
    m.b1.resize(static_cast<std::size_t>(m.hidden_dim));
    m.w2.resize(static_cast<std::size_t>(m.hidden_dim));
    fnn_unpack(m, j.at("params").get<std::vector<double>>());
    return m;
}

}  // namespace

void save_fnn_checkpoint(const std::filesystem::path& path, const FnnTrainConfig& cfg,
                         const FnnTrainResult& res) {
    nlohmann::ordered_json j;
    j["format"] = "qrobust-fnn-checkpoint-v1";
    j["config"]["epochs"] = cfg.epochs;
    j["config"]["batch_size"] = cfg.batch_size;
    j["config"]["lr"] = cfg.lr;
    j["config"]["seed"] = cfg.seed;
    j["config"]["adversarial_mix"] = cfg.adversarial_mix;
    j["config"]["hidden_dim"] = cfg.hidden_dim;
    j["model_final"] = model_to_json(res.model_final);
    j["model_best"] = model_to_json(res.model_best);
    j["best_epoch"] = res.best_epoch;
    j["best_test_acc"] = res.best_test_acc;
    j["best_loss"] = res.best_loss;
    nlohmann::ordered_json hist = nlohmann::ordered_json::array();
    for (const EpochStats& e : res.history) {
        nlohmann::ordered_json je;
        je["epoch"] = e.epoch;
        je["loss"] = e.loss;
        je["train_acc"] = e.train_acc;
        je["test_acc"] = e.test_acc;
        if (std::isfinite(e.adv_acc)) je["adv_acc"] = e.adv_acc;
        hist.push_back(std::move(je));
    }
    j["history"] = std::move(hist);
    write_file(path, j.dump(1));
}

FnnCheckpoint load_fnn_checkpoint(const std::filesystem::path& path) {
    const nlohmann::json j = nlohmann::json::parse(read_file(path));
    if (j.at("format").get<std::string>() != "qrobust-fnn-checkpoint-v1")
        throw std::runtime_error("fnn checkpoint: unknown format tag");
    FnnCheckpoint ck;
    const auto& jc = j.at("config");
    ck.config.epochs = jc.at("epochs").get<int>();
    ck.config.batch_size = jc.at("batch_size").get<int>();
    ck.config.lr = jc.at("lr").get<double>();
    ck.config.seed = jc.at("seed").get<std::uint64_t>();
    ck.config.adversarial_mix = jc.at("adversarial_mix").get<double>();
    ck.config.hidden_dim = jc.at("hidden_dim").get<int>();
    ck.result.model_final = model_from_json(j.at("model_final"));
    ck.result.model_best = model_from_json(j.at("model_best"));
    ck.result.best_epoch = j.at("best_epoch").get<int>();
    ck.result.best_test_acc = j.at("best_test_acc").get<double>();
    ck.result.best_loss = j.at("best_loss").is_null()
                              ? std::numeric_limits<double>::infinity()
                              : j.at("best_loss").get<double>();
    for (const auto& je : j.at("history")) {
        EpochStats e;
        e.epoch = je.at("epoch").get<int>();
        e.loss = je.at("loss").get<double>();
        e.train_acc = je.at("train_acc").get<double>();
        e.test_acc = je.at("test_acc").get<double>();
        if (je.contains("adv_acc")) e.adv_acc = je.at("adv_acc").get<double>();
        ck.result.history.push_back(e);
    }
    return ck;
}

double robustness_ratio(const RobustnessReport& qnn, const RobustnessReport& fnn) {
    if (qnn.eps_hat != fnn.eps_hat || qnn.num_samples != fnn.num_samples)
        throw std::invalid_argument(
            "robustness_ratio: reports measured under different protocols");
    if (!(fnn.r_adv > 0.0))
        throw std::invalid_argument("robustness_ratio: baseline score must be positive");
    return qnn.r_adv / fnn.r_adv;
}

}  // namespace qrob
