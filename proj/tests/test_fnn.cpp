#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qrob/attack.hpp"
#include "qrob/fnn.hpp"
#include "qrob/robustness.hpp"

using namespace qrob;

namespace {

Dataset fnn_dataset(std::uint64_t seed, int per_class = 60, int test_total = 40) {
    return make_synthetic_emnist_dataset(emnist_profile("desk-12q"), seed, per_class,
                                         test_total);
}

std::vector<double> random_input(Rng& rng, int dim) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (double& v : x) v = rng.uniform();
    return x;
}

}  // namespace

TEST_CASE("parameter count matches the architecture arithmetic") {
    const FnnModel full = init_fnn(225, 5, 1);
    CHECK(full.param_count() == 1136);
    CHECK(full.w1.size() == 1125);
    CHECK(full.b1.size() == 5);
    CHECK(full.w2.size() == 5);
    const FnnModel desk = init_fnn(100, 5, 1);
    CHECK(desk.param_count() == 511);
    CHECK(fnn_pack(full).size() == 1136);
}

TEST_CASE("zero model outputs exactly 0.5; sigmoid keeps output in (0,1)") {
    FnnModel m = init_fnn(9, 4, 2);
    std::vector<double> zeros(static_cast<std::size_t>(m.param_count()), 0.0);
    fnn_unpack(m, zeros);
    Rng rng(3);
    const std::vector<double> x = random_input(rng, 9);
    CHECK(fnn_forward(m, x) == 0.5);

    const FnnModel r = init_fnn(9, 4, 7);
    for (int i = 0; i < 50; ++i) {
        const double p = fnn_forward(r, random_input(rng, 9));
        CHECK(p > 0.0);
        CHECK(p < 1.0);
    }
}

TEST_CASE("init bounds follow 1/sqrt(fan_in) per layer and depend on the seed") {
    const FnnModel m = init_fnn(16, 5, 11);
    const double s1 = 1.0 / 4.0;
    const double s2 = 1.0 / std::sqrt(5.0);
    for (double w : m.w1) CHECK(std::abs(w) <= s1);
    for (double b : m.b1) CHECK(std::abs(b) <= s1);
    for (double w : m.w2) CHECK(std::abs(w) <= s2);
    CHECK(std::abs(m.b2) <= s2);
    const FnnModel other = init_fnn(16, 5, 12);
    CHECK(m.w1 != other.w1);
    CHECK(init_fnn(16, 5, 11).w1 == m.w1);
}

TEST_CASE("backprop matches central finite differences to 1e-6 relative") {
    const int dim = 7;
    const FnnModel m = init_fnn(dim, 3, 19);
    Rng rng(20);
    const double h = 1e-6;
    for (int rep = 0; rep < 5; ++rep) {
        const std::vector<double> x = random_input(rng, dim);
        const int label = rep % 2;
        const FnnGradient g = fnn_loss_gradient(m, x, label, true);

        const std::vector<double> flat = fnn_pack(m);
        std::vector<double> analytic;
        analytic.insert(analytic.end(), g.dw1.begin(), g.dw1.end());
        analytic.insert(analytic.end(), g.db1.begin(), g.db1.end());
        analytic.insert(analytic.end(), g.dw2.begin(), g.dw2.end());
        analytic.push_back(g.db2);

        FnnModel probe = m;
        for (std::size_t k = 0; k < flat.size(); ++k) {
            std::vector<double> bumped = flat;
            bumped[k] = flat[k] + h;
            fnn_unpack(probe, bumped);
            const double up = fnn_loss_gradient(probe, x, label).loss;
            bumped[k] = flat[k] - h;
            fnn_unpack(probe, bumped);
            const double dn = fnn_loss_gradient(probe, x, label).loss;
            const double fd = (up - dn) / (2.0 * h);
            CHECK(std::abs(analytic[k] - fd) <=
                  1e-6 * std::max(1.0, std::abs(fd)));
        }

        for (std::size_t i = 0; i < x.size(); ++i) {
            std::vector<double> xx = x;
            xx[i] = x[i] + h;
            const double up = fnn_loss_gradient(m, xx, label).loss;
            xx[i] = x[i] - h;
            const double dn = fnn_loss_gradient(m, xx, label).loss;
            const double fd = (up - dn) / (2.0 * h);
            CHECK(std::abs(g.dx[i] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("dimension mismatches throw") {
    const FnnModel m = init_fnn(8, 3, 1);
    const std::vector<double> wrong(5, 0.1);
    CHECK_THROWS_AS(fnn_forward(m, wrong), std::invalid_argument);
    FnnModel u = m;
    CHECK_THROWS_AS(fnn_unpack(u, wrong), std::invalid_argument);
    CHECK_THROWS_AS(init_fnn(0, 3, 1), std::invalid_argument);
}

TEST_CASE("training is seed-deterministic and clean equals mix zero") {
    const Dataset ds = fnn_dataset(14);
    FnnTrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 20;
    cfg.seed = 5;
    const FnnTrainResult a = fnn_train(ds, cfg);
    const FnnTrainResult b = fnn_train(ds, cfg);
    CHECK(a.model_final.w1 == b.model_final.w1);
    CHECK(a.model_final.b2 == b.model_final.b2);
    CHECK(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i)
        CHECK(a.history[i].loss == b.history[i].loss);

    cfg.seed = 6;
    const FnnTrainResult c = fnn_train(ds, cfg);
    CHECK(a.model_final.w1 != c.model_final.w1);

    // explicit zero mix with a nonempty set is bitwise identical to clean
    cfg.seed = 5;
    cfg.adversarial_mix = 0.0;
    const FnnModel seed_model = init_fnn(100, 5, 99);
    const std::vector<Sample> adv = fnn_adversarial_set(
        seed_model, std::span<const Sample>(ds.train.data(), 10), 0.1);
    const FnnTrainResult d = fnn_train(ds, cfg, adv);
    CHECK(a.model_final.w1 == d.model_final.w1);
}

TEST_CASE("desk-profile synthetic letters train to high accuracy") {
    const Dataset ds = fnn_dataset(2, 300, 100);  // 500 train / 100 test
    FnnTrainConfig cfg;
    cfg.seed = 1;
    const FnnTrainResult res = fnn_train(ds, cfg);  // 10 epochs, lr 0.01
    CHECK(res.best_test_acc >= 0.95);
    CHECK(res.history.size() == 10);
    const EvalStats best = fnn_evaluate(res.model_best, ds.test);
    CHECK(best.accuracy == res.best_test_acc);
}

TEST_CASE("adversarial mixing consumes the set and shifts the trajectory") {
    const Dataset ds = fnn_dataset(14);
    FnnTrainConfig cfg;
    cfg.epochs = 4;
    cfg.batch_size = 20;
    cfg.seed = 5;
    const FnnTrainResult clean = fnn_train(ds, cfg);

    const std::vector<Sample> adv =
        fnn_adversarial_set(clean.model_best, ds.train, 0.1);
    cfg.adversarial_mix = 0.3;
    const FnnTrainResult mixed = fnn_train(ds, cfg, adv);
    CHECK(std::isfinite(mixed.history.back().adv_acc));
    CHECK(mixed.model_final.w1 != clean.model_final.w1);
    CHECK_THROWS_AS(fnn_train(ds, cfg, {}), std::invalid_argument);
}

TEST_CASE("fgsm on raw pixels: sup norm, loss increase, missing pixels rejected") {
    const Dataset ds = fnn_dataset(8);
    FnnTrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 20;
    const FnnTrainResult res = fnn_train(ds, cfg);
    const FnnModel& m = res.model_best;

    const double eps_hat = 0.05;
    const std::vector<Sample> adv = fnn_adversarial_set(m, ds.test, eps_hat);
    REQUIRE(adv.size() == ds.test.size());
    int raised = 0;
    for (std::size_t i = 0; i < adv.size(); ++i) {
        CHECK(adv[i].id == ds.test[i].id);
        CHECK(adv[i].features.empty());
        double sup = 0.0;
        for (std::size_t j = 0; j < adv[i].raw_pixels.size(); ++j)
            sup = std::max(sup,
                           std::abs(adv[i].raw_pixels[j] - ds.test[i].raw_pixels[j]));
        CHECK(sup <= eps_hat + 1e-15);
        const double before =
            fnn_loss_gradient(m, ds.test[i].raw_pixels, ds.test[i].label).loss;
        const double after = fnn_loss_gradient(m, adv[i].raw_pixels, adv[i].label).loss;
        if (after > before) ++raised;
    }
    // FGSM follows the loss gradient: the loss must rise for nearly all inputs
    CHECK(raised >= static_cast<int>(0.9 * double(adv.size())));

    Sample bare;
    bare.id = 1;
    bare.label = 0;
    bare.features = {0.1};
    CHECK_THROWS_AS(fnn_adversarial_set(m, std::span<const Sample>(&bare, 1), 0.1),
                    std::invalid_argument);
}

TEST_CASE("robustness score drops under attack strength and ratio checks protocols") {
    const Dataset ds = fnn_dataset(2, 120, 60);
    FnnTrainConfig cfg;
    cfg.seed = 1;
    const FnnTrainResult res = fnn_train(ds, cfg);
    const double r = fnn_adv_robustness(res.model_best, ds.test, 0.1);
    CHECK(r > 0.0);
    CHECK(r < 1.0);

    RobustnessReport a{r, 0.1, static_cast<int>(ds.test.size())};
    RobustnessReport b{2.0 * r, 0.1, static_cast<int>(ds.test.size())};
    CHECK(robustness_ratio(a, a) == 1.0);
    CHECK(robustness_ratio(b, a) == doctest::Approx(2.0).epsilon(1e-15));
    RobustnessReport wrong = a;
    wrong.eps_hat = 0.2;
    CHECK_THROWS_AS(robustness_ratio(wrong, a), std::invalid_argument);
    wrong = a;
    wrong.num_samples -= 1;
    CHECK_THROWS_AS(robustness_ratio(wrong, a), std::invalid_argument);
    RobustnessReport dead = a;
    dead.r_adv = 0.0;
    CHECK_THROWS_AS(robustness_ratio(a, dead), std::invalid_argument);
}

TEST_CASE("scaling all positive sensitivities down raises the mean score") {
    // the decoherence factor e^{-t/T1} < 1 multiplies every delta-p, hence
    // every S; with all S > 0 the logistic mean must strictly increase
    Rng rng(41);
    std::vector<double> s(50), scaled(50);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = rng.uniform(0.01, 6.0);
        scaled[i] = 0.9217 * s[i];  // e^{-1.6/19.57}
    }
    CHECK(adv_robustness(scaled) > adv_robustness(s));
}
