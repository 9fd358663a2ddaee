#include "qrob/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace qrob {

void AdamState::step(std::vector<double>& theta, const std::vector<double>& grad) {
    if (theta.size() != m.size() || grad.size() != m.size())
        throw std::invalid_argument("adam: dimension mismatch");
    ++t;
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double mhat = m[i] / c1;
        const double vhat = v[i] / c2;
        theta[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

}  // namespace qrob
