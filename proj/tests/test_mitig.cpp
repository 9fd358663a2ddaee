#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qrob/mitigation.hpp"

using namespace qrob;

namespace {

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
    // normalized exponentials: uniform on the simplex
    std::vector<double> v(n);
    double sum = 0.0;
    for (double& p : v) {
        p = -std::log(rng.uniform() + 1e-300);
        sum += p;
    }
    for (double& p : v) p /= sum;
    return v;
}

}  // namespace

TEST_CASE("single-qubit assignment matrix layout and row sums") {
    const AssignmentMatrix R = single_qubit_assignment(0.958, 0.893);
    CHECK(R.qubits == 1);
    CHECK(R.at(0, 0) == 0.958);
    CHECK(R.at(0, 1) == doctest::Approx(0.042).epsilon(1e-14));
    CHECK(R.at(1, 0) == doctest::Approx(0.107).epsilon(1e-14));
    CHECK(R.at(1, 1) == 0.893);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(R.at(i, 0) + R.at(i, 1) == doctest::Approx(1.0).epsilon(1e-15));

    const AssignmentMatrix D = single_qubit_assignment();
    CHECK(D.at(0, 0) == kReadoutF0);
    CHECK(D.at(1, 1) == kReadoutF1);
    CHECK_THROWS_AS(single_qubit_assignment(1.2, 0.9), std::invalid_argument);
}

TEST_CASE("tensor product: no-crosstalk two-qubit matrix") {
    const AssignmentMatrix A = single_qubit_assignment(0.9, 0.8);
    const AssignmentMatrix B = single_qubit_assignment(0.95, 0.85);
    const AssignmentMatrix R = tensor_assignment(A, B);  // A on the high bit
    CHECK(R.qubits == 2);
    CHECK(R.dim() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 4; ++j) row += R.at(i, j);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    }
    // R[(ih il)][(jh jl)] = A[ih][jh] * B[il][jl]
    for (std::size_t ih = 0; ih < 2; ++ih)
        for (std::size_t il = 0; il < 2; ++il)
            for (std::size_t jh = 0; jh < 2; ++jh)
                for (std::size_t jl = 0; jl < 2; ++jl)
                    CHECK(R.at(ih * 2 + il, jh * 2 + jl) ==
                          doctest::Approx(A.at(ih, jh) * B.at(il, jl)).epsilon(1e-15));
    // prepared |10>: high bit flips with 1-F1(A), low bit with 1-F0(B)
    CHECK(R.at(2, 2) == doctest::Approx(0.8 * 0.95).epsilon(1e-15));
    CHECK(R.at(2, 0) == doctest::Approx(0.2 * 0.95).epsilon(1e-15));
}

TEST_CASE("apply_assignment: identity passes through, bias matches closed form") {
    const std::vector<double> v{0.7, 0.3};
    const AssignmentMatrix I = identity_assignment(1);
    const std::vector<double> same = apply_assignment(v, I);
    CHECK(same[0] == v[0]);
    CHECK(same[1] == v[1]);

    const AssignmentMatrix R = single_qubit_assignment(0.958, 0.893);
    const std::vector<double> pure{1.0, 0.0};
    const std::vector<double> w = apply_assignment(pure, R);
    CHECK(w[1] == doctest::Approx(0.042).epsilon(1e-14));  // measured-1 fraction

    const std::vector<double> mixed = apply_assignment(v, R);
    CHECK(mixed[0] == doctest::Approx(0.7 * 0.958 + 0.3 * 0.107).epsilon(1e-14));
    CHECK(mixed[0] + mixed[1] == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(apply_assignment(std::vector<double>{0.5, 0.6}, R),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_assignment(std::vector<double>{1.0, 0.0, 0.0}, R),
                    std::invalid_argument);
}

TEST_CASE("readout sampling: identity matrix draws from the true distribution") {
    Rng rng(31);
    const std::vector<double> truth{0.25, 0.75};
    const AssignmentMatrix I = identity_assignment(1);
    const std::uint64_t shots = 1000000;
    const std::vector<std::uint64_t> counts = apply_readout_noise(truth, I, shots, rng);
    CHECK(counts[0] + counts[1] == shots);
    const double frac = double(counts[0]) / double(shots);
    const double sigma = std::sqrt(0.25 * 0.75 / double(shots));
    CHECK(std::abs(frac - 0.25) < 5.0 * sigma);
}

TEST_CASE("readout sampling: biased matrix shifts the observed fraction") {
    Rng rng(32);
    const AssignmentMatrix R = single_qubit_assignment(0.958, 0.893);
    const std::vector<double> truth{1.0, 0.0};
    const std::uint64_t shots = 1000000;
    const std::vector<std::uint64_t> counts = apply_readout_noise(truth, R, shots, rng);
    const double frac1 = double(counts[1]) / double(shots);
    const double sigma = std::sqrt(0.042 * 0.958 / double(shots));
    CHECK(std::abs(frac1 - 0.042) < 5.0 * sigma);
    CHECK_THROWS_AS(apply_readout_noise(truth, R, 0, rng), std::invalid_argument);
}

TEST_CASE("counts_to_dist normalizes and validates") {
    const std::vector<std::uint64_t> counts{3, 1, 0, 4};
    const std::vector<double> d = counts_to_dist(counts);
    CHECK(d[0] == 0.375);
    CHECK(d[2] == 0.0);
    CHECK(d[3] == 0.5);
    CHECK_THROWS_AS(counts_to_dist(std::vector<std::uint64_t>{}), std::invalid_argument);
    CHECK_THROWS_AS(counts_to_dist(std::vector<std::uint64_t>{0, 0}), std::invalid_argument);
}

TEST_CASE("ibu: identity matrix recovers the input in one iteration") {
    const AssignmentMatrix I = identity_assignment(1);
    const std::vector<double> w{0.6, 0.4};
    const IbuResult one = ibu_correct(w, I, 1);
    CHECK(one.v[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(one.v[1] == doctest::Approx(0.4).epsilon(1e-15));
    // with the full budget the exact fixed point stops the loop early
    const IbuResult full = ibu_correct(w, I);
    CHECK(full.v[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(full.iterations <= 3);
    CHECK(full.delta == 0.0);
}

TEST_CASE("ibu: w = R^T v* makes v* a fixed point") {
    const AssignmentMatrix R = single_qubit_assignment();
    const std::vector<double> vstar{0.35, 0.65};
    const std::vector<double> w = apply_assignment(vstar, R);

    // one iteration starting exactly at v*: row-stochasticity keeps it put
    const IbuResult pinned = ibu_correct(w, R, 1, vstar);
    CHECK(pinned.v[0] == doctest::Approx(vstar[0]).epsilon(1e-14));
    CHECK(pinned.v[1] == doctest::Approx(vstar[1]).epsilon(1e-14));
    CHECK(pinned.delta <= 1e-14);

    // from the uniform prior the iteration converges to the same point
    const IbuResult res = ibu_correct(w, R);
    CHECK(res.v[0] == doctest::Approx(vstar[0]).epsilon(1e-9));
    CHECK(res.v[1] == doctest::Approx(vstar[1]).epsilon(1e-9));

    // same story on two qubits
    const AssignmentMatrix R2 = tensor_assignment(R, R);
    Rng rng(5);
    const std::vector<double> v2 = random_simplex(rng, 4);
    const std::vector<double> w2 = apply_assignment(v2, R2);
    const IbuResult pinned2 = ibu_correct(w2, R2, 1, v2);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(pinned2.v[i] - v2[i]) <= 1e-14);
}

TEST_CASE("ibu: simplex preserved at every iteration") {
    const AssignmentMatrix R2 =
        tensor_assignment(single_qubit_assignment(), single_qubit_assignment());
    Rng rng(6);
    const std::vector<double> truth = random_simplex(rng, 4);
    const std::vector<double> w = apply_assignment(truth, R2);
    for (int iters = 1; iters <= 12; ++iters) {
        const IbuResult res = ibu_correct(w, R2, iters);
        double sum = 0.0;
        for (double p : res.v) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("ibu: unfolding beats raw counts across 100 random trials") {
    const AssignmentMatrix R2 =
        tensor_assignment(single_qubit_assignment(), single_qubit_assignment());
    Rng rng(7);
    const std::uint64_t shots = 100000;
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<double> truth = random_simplex(rng, 4);
        const std::vector<std::uint64_t> counts =
            apply_readout_noise(truth, R2, shots, rng);
        const std::vector<double> w = counts_to_dist(counts);
        const IbuResult res = ibu_correct(w, R2);
        CHECK(total_variation(res.v, truth) <= total_variation(w, truth));
    }
}

TEST_CASE("ibu: million-shot pipeline recovers the truth to 1e-3") {
    const AssignmentMatrix R = single_qubit_assignment();
    Rng rng(8);
    const std::vector<double> truth{0.8, 0.2};
    const std::vector<std::uint64_t> counts = apply_readout_noise(truth, R, 1000000, rng);
    const std::vector<double> w = counts_to_dist(counts);
    const IbuResult res = ibu_correct(w, R);
    CHECK(total_variation(res.v, truth) <= 1e-3);
    // raw counts carry the net readout bias 0.8*(1-F0) - 0.2*(1-F1) = 0.011
    CHECK(total_variation(w, truth) > 0.008);
    CHECK(total_variation(res.v, truth) <= 0.2 * total_variation(w, truth));
}

TEST_CASE("ibu: unreachable observed outcome aborts, unobserved is fine") {
    AssignmentMatrix sink;
    sink.qubits = 1;
    sink.r = {1.0, 0.0, 1.0, 0.0};  // everything reads as outcome 0
    const std::vector<double> impossible{0.5, 0.5};
    CHECK_THROWS_AS(ibu_correct(impossible, sink), std::runtime_error);
    const std::vector<double> consistent{1.0, 0.0};
    const IbuResult res = ibu_correct(consistent, sink);  // 0/0 term skipped
    CHECK(res.v[0] + res.v[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ibu: input validation") {
    const AssignmentMatrix R = single_qubit_assignment();
    const std::vector<double> w{0.6, 0.4};
    CHECK_THROWS_AS(ibu_correct(std::vector<double>{0.6, 0.5}, R), std::invalid_argument);
    CHECK_THROWS_AS(ibu_correct(std::vector<double>{-0.1, 1.1}, R), std::invalid_argument);
    CHECK_THROWS_AS(ibu_correct(w, R, 0), std::invalid_argument);
    CHECK_THROWS_AS(ibu_correct(w, R, 50, std::vector<double>{0.2, 0.3, 0.5}),
                    std::invalid_argument);
    AssignmentMatrix bad = R;
    bad.r[0] = 0.9;  // row no longer sums to 1
    CHECK_THROWS_AS(ibu_correct(w, bad), std::invalid_argument);
}

TEST_CASE("total variation: anchors and symmetry") {
    const std::vector<double> p{1.0, 0.0};
    const std::vector<double> q{0.0, 1.0};
    CHECK(total_variation(p, p) == 0.0);
    CHECK(total_variation(p, q) == 1.0);
    const std::vector<double> a{0.5, 0.3, 0.2};
    const std::vector<double> b{0.4, 0.4, 0.2};
    CHECK(total_variation(a, b) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(total_variation(a, b) == total_variation(b, a));
    CHECK_THROWS_AS(total_variation(p, a), std::invalid_argument);
}
