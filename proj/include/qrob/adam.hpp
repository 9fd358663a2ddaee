#pragma once

#include <vector>

namespace qrob {

struct AdamConfig {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First/second-moment adaptive update with bias correction:
//   m_t = b1 m_{t-1} + (1-b1) g,  v_t = b2 v_{t-1} + (1-b2) g^2,
//   theta -= lr * (m_t / (1-b1^t)) / (sqrt(v_t / (1-b2^t)) + eps).
struct AdamState {
    AdamConfig cfg;
    int t = 0;
    std::vector<double> m;
    std::vector<double> v;

    AdamState() = default;
    AdamState(int dim, const AdamConfig& c)
        : cfg(c), m(std::size_t(dim), 0.0), v(std::size_t(dim), 0.0) {}

    void step(std::vector<double>& theta, const std::vector<double>& grad);
};

}  // namespace qrob
