#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qrob/density.hpp"
#include "qrob/statevector.hpp"

using namespace qrob;

namespace {

constexpr double kPi = 3.14159265358979323846;

Gate random_gate(Rng& rng, int n) {
    const int q = static_cast<int>(rng.uniform_int(n));
    switch (rng.uniform_int(4)) {
        case 0:
            return Gate::rx(q, rng.uniform(-2 * kPi, 2 * kPi));
        case 1:
            return Gate::rz(q, rng.uniform(-2 * kPi, 2 * kPi));
        case 2:
            return Gate::su2(q, rng.uniform(-2 * kPi, 2 * kPi),
                             rng.uniform(-2 * kPi, 2 * kPi),
                             rng.uniform(-2 * kPi, 2 * kPi));
        default: {
            int p = static_cast<int>(rng.uniform_int(n - 1));
            if (p >= q) ++p;
            return Gate::cz(q, p);
        }
    }
}

StateVector random_state(Rng& rng, int n, int depth = 12) {
    StateVector psi(n);
    for (int i = 0; i < depth; ++i) psi.apply_gate(random_gate(rng, n));
    return psi;
}

bool states_equal_up_to_phase(const StateVector& a, const StateVector& b, double tol) {
    const cplx ov = inner_product(a, b);
    if (std::abs(std::abs(ov) - 1.0) > tol) return false;
    const cplx phase = ov / std::abs(ov);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(phase * a[i] - b[i]) > tol) return false;
    return true;
}

}  // namespace

TEST_CASE("su2 closed form equals its five-gate native decomposition") {
    Rng rng(91);
    for (int trial = 0; trial < 100; ++trial) {
        const double th = rng.uniform(-2 * kPi, 2 * kPi);
        const double ph = rng.uniform(-2 * kPi, 2 * kPi);
        const double la = rng.uniform(-2 * kPi, 2 * kPi);
        oracle::DMat prod = oracle::from_mat2(rz_matrix(ph - kPi / 2));
        prod = oracle::matmul(prod, oracle::from_mat2(rx_matrix(kPi / 2)));
        prod = oracle::matmul(prod, oracle::from_mat2(rz_matrix(kPi - th)));
        prod = oracle::matmul(prod, oracle::from_mat2(rx_matrix(kPi / 2)));
        prod = oracle::matmul(prod, oracle::from_mat2(rz_matrix(la - kPi / 2)));
        const Mat2 closed = su2_matrix(th, ph, la);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(std::abs(prod.at(r, c) - closed[2 * r + c]) < 1e-12);
    }
}

TEST_CASE("su2 has unit determinant and is unitary") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat2 m = su2_matrix(rng.uniform(-7, 7), rng.uniform(-7, 7), rng.uniform(-7, 7));
        const cplx det = m[0] * m[3] - m[1] * m[2];
        CHECK(std::abs(det - cplx(1, 0)) < 1e-12);
        CHECK(std::abs(std::norm(m[0]) + std::norm(m[1]) - 1.0) < 1e-12);
        CHECK(std::abs(m[0] * std::conj(m[2]) + m[1] * std::conj(m[3])) < 1e-12);
    }
}

TEST_CASE("su2 angle derivatives match finite differences") {
    Rng rng(23);
    const double h = 1e-6;
    for (int trial = 0; trial < 30; ++trial) {
        double a[3] = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        for (int which = 0; which < 3; ++which) {
            double ap[3] = {a[0], a[1], a[2]}, am[3] = {a[0], a[1], a[2]};
            ap[which] += h;
            am[which] -= h;
            const Mat2 mp = su2_matrix(ap[0], ap[1], ap[2]);
            const Mat2 mm = su2_matrix(am[0], am[1], am[2]);
            const Mat2 d = su2_matrix_deriv(a[0], a[1], a[2], which);
            for (int i = 0; i < 4; ++i)
                CHECK(std::abs((mp[i] - mm[i]) / (2 * h) - d[i]) < 1e-8);
        }
    }
}

TEST_CASE("single-qubit kernels match dense embeddings") {
    Rng rng(5);
    const int n = 3;
    for (int trial = 0; trial < 40; ++trial) {
        StateVector psi = random_state(rng, n);
        const Gate g = random_gate(rng, n);

        std::vector<cplx> ref(psi.amplitudes());
        if (g.kind == GateKind::Cz) {
            ref = oracle::matvec(oracle::dense_cz(g.q0, g.q1, n), ref);
        } else {
            ref = oracle::matvec(oracle::embed_1q(gate_matrix(g), g.q0, n), ref);
        }

        psi.apply_gate(g);
        for (std::size_t i = 0; i < psi.size(); ++i)
            CHECK(std::abs(psi[i] - ref[i]) < 1e-12);
    }
}

TEST_CASE("random circuits preserve the norm") {
    Rng rng(7);
    for (int n = 1; n <= 6; ++n) {
        StateVector psi(n);
        for (int i = 0; i < 60; ++i) {
            if (n == 1) {
                Gate g = random_gate(rng, 2);  // may draw CZ; force 1q for n=1
                while (g.kind == GateKind::Cz) g = random_gate(rng, 2);
                g.q0 = 0;
                psi.apply_gate(g);
            } else {
                psi.apply_gate(random_gate(rng, n));
            }
        }
        CHECK(std::abs(psi.norm_sq() - 1.0) < 1e-10);
    }
}

TEST_CASE("reduced density matches the full partial-trace oracle") {
    Rng rng(11);
    for (int n = 2; n <= 4; ++n) {
        for (int trial = 0; trial < 25; ++trial) {
            const StateVector psi = random_state(rng, n, 16);
            for (int q = 0; q < n; ++q) {
                const Density1Q got = reduced_density(psi, q);
                const Density1Q want = oracle::partial_trace_oracle(psi.amplitudes(), q);
                for (int i = 0; i < 4; ++i) CHECK(std::abs(got.m[i] - want.m[i]) < 1e-12);
                CHECK(std::abs(got.trace() - 1.0) < 1e-12);
                CHECK(std::abs(got.m[1] - std::conj(got.m[2])) < 1e-14);
            }
        }
    }
}

TEST_CASE("closed-form fidelity matches the matrix-square-root definition") {
    Rng rng(13);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Density1Q rho = oracle::random_density(rng);
        const Density1Q sig = oracle::random_density(rng);
        const double got = fidelity(rho, sig);
        const double want = oracle::fidelity_oracle(rho, sig);
        worst = std::max(worst, std::abs(got - want));
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("fidelity edge cases") {
    Density1Q zero;  // |0><0|
    Density1Q one;
    one.m[0] = 0.0;
    one.m[3] = 1.0;
    CHECK(fidelity(zero, zero) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity(zero, one) == doctest::Approx(0.0).epsilon(1e-12));

    Rng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const Density1Q a = oracle::random_density(rng);
        const Density1Q b = oracle::random_density(rng);
        CHECK(fidelity(a, b) == doctest::Approx(fidelity(b, a)).epsilon(1e-12));
        CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("linear cluster state: amplitudes and stabilizers") {
    // n = 2 by hand: H x H then CZ gives (1,1,1,-1)/2.
    StateVector two(2);
    two.apply_gate(hadamard_as_su2(0));
    two.apply_gate(hadamard_as_su2(1));
    two.apply_cz(0, 1);
    StateVector want(2);
    want[0] = cplx(0.5, 0);
    want[1] = cplx(0.5, 0);
    want[2] = cplx(0.5, 0);
    want[3] = cplx(-0.5, 0);
    CHECK(states_equal_up_to_phase(two, want, 1e-12));

    // Stabilizers Z_{i-1} X_i Z_{i+1} (Z dropped off the ends) all +1.
    for (int n : {2, 3, 5, 10, 20}) {
        StateVector psi(n);
        for (int q = 0; q < n; ++q) psi.apply_gate(hadamard_as_su2(q));
        for (int q = 0; q + 1 < n; ++q) psi.apply_cz(q, q + 1);
        for (int i = 0; i < n; ++i) {
            std::vector<std::pair<int, char>> ops;
            if (i > 0) ops.push_back({i - 1, 'Z'});
            ops.push_back({i, 'X'});
            if (i + 1 < n) ops.push_back({i + 1, 'Z'});
            CHECK(expectation_pauli_string(psi, ops) == doctest::Approx(1.0).epsilon(1e-10));
        }
        CHECK(std::abs(psi.norm_sq() - 1.0) < 1e-10);
    }
}

TEST_CASE("expectation_z sign convention") {
    StateVector psi(2);
    CHECK(psi.expectation_z(0) == doctest::Approx(1.0));
    CHECK(psi.expectation_z(1) == doctest::Approx(1.0));
    psi.apply_rx(1, kPi);  // |0> -> -i|1>
    CHECK(psi.expectation_z(1) == doctest::Approx(-1.0));
    CHECK(psi.expectation_z(0) == doctest::Approx(1.0));
    CHECK(psi.prob_zero(1) == doctest::Approx(0.0));
}

TEST_CASE("rz applies opposite phases to the two basis states") {
    StateVector psi(1);
    psi.apply_gate(hadamard_as_su2(0));
    psi.apply_rz(0, kPi / 2);
    // <X> of Rz(a)|+> is cos(a).
    CHECK(expectation_pauli_string(psi, {{0, 'X'}}) ==
          doctest::Approx(std::cos(kPi / 2)).epsilon(1e-12));
    CHECK(expectation_pauli_string(psi, {{0, 'Y'}}) ==
          doctest::Approx(std::sin(kPi / 2)).epsilon(1e-12));
}

TEST_CASE("sample_counts is deterministic and statistically sane") {
    StateVector psi(1);
    psi.apply_gate(hadamard_as_su2(0));

    Rng rng_a = Rng::substream(42, "shots");
    Rng rng_b = Rng::substream(42, "shots");
    const auto [z1, o1] = sample_counts(psi, 0, 1000000, rng_a);
    const auto [z2, o2] = sample_counts(psi, 0, 1000000, rng_b);
    CHECK(z1 == z2);
    CHECK(o1 == o2);
    CHECK(z1 + o1 == 1000000);
    // 4 sigma of a fair coin at 1e6 shots is 0.002.
    CHECK(std::abs(static_cast<double>(o1) / 1e6 - 0.5) < 0.002);

    StateVector ground(1);
    Rng rng_c = Rng::substream(42, "shots");
    const auto [zg, og] = sample_counts(ground, 0, 10000, rng_c);
    CHECK(zg == 10000);
    CHECK(og == 0);
}

TEST_CASE("substreams with different names decouple") {
    Rng a = Rng::substream(7, "data-split");
    Rng b = Rng::substream(7, "init");
    Rng c = Rng::substream(8, "data-split");
    Rng a2 = Rng::substream(7, "data-split");
    CHECK(a.next_u64() != b.next_u64());
    CHECK(a2.next_u64() == Rng::substream(7, "data-split").next_u64());
    CHECK(Rng::substream(7, "data-split").next_u64() != c.next_u64());
    CHECK(Rng::substream(7, "batch", 0).next_u64() != Rng::substream(7, "batch", 1).next_u64());
}
