#include "qrob/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qrob/density.hpp"
#include "qrob/parallel.hpp"

namespace qrob {
namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

void check_dim(const Mask& mask, std::size_t dim, const char* who) {
    if (mask.bits.size() != dim)
        throw std::invalid_argument(std::string(who) + ": mask dimension mismatch");
}

}  // namespace

int Mask::popcount() const {
    int c = 0;
    for (std::uint8_t b : bits) c += b ? 1 : 0;
    return c;
}

Mask full_mask(int dim) {
    if (dim < 1) throw std::invalid_argument("full_mask: dim must be positive");
    Mask m;
    m.bits.assign(static_cast<std::size_t>(dim), 1);
    m.fraction = 1.0;
    return m;
}

std::vector<double> average_abs_input_gradient(const Model& m, std::span<const double> theta,
                                               const std::vector<Sample>& samples,
                                               GradEngine engine) {
    if (samples.empty())
        throw std::invalid_argument("average_abs_input_gradient: no samples");
    const std::size_t d = static_cast<std::size_t>(m.num_features());
    for (const Sample& s : samples)
        if (s.features.size() != d)
            throw std::invalid_argument("average_abs_input_gradient: sample dimension mismatch");
    std::vector<std::vector<double>> grads(samples.size());
    parallel_for(samples.size(), [&](std::size_t k) {
        const Sample& s = samples[k];
        grads[k] = input_gradient(m, theta, s.features, s.label, engine);
    });
    std::vector<double> avg(d, 0.0);
    for (const std::vector<double>& g : grads)
        for (std::size_t j = 0; j < d; ++j) avg[j] += std::abs(g[j]);
    for (double& a : avg) a /= static_cast<double>(samples.size());
    return avg;
}

MaskBuildResult build_mask(const std::vector<double>& avg_abs_grad, double r) {
    const int dim = static_cast<int>(avg_abs_grad.size());
    if (dim == 0) throw std::invalid_argument("build_mask: empty gradient vector");
    if (!(r > 0.0) || r > 1.0)
        throw std::invalid_argument("build_mask: fraction must lie in (0, 1]");
    const double total = std::accumulate(avg_abs_grad.begin(), avg_abs_grad.end(), 0.0);
    if (!(total > 0.0))
        throw std::runtime_error("build_mask: all gradient components are zero");

    std::vector<int> order(avg_abs_grad.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return avg_abs_grad[std::size_t(a)] > avg_abs_grad[std::size_t(b)];
    });

    MaskBuildResult out;
    out.mask.bits.assign(avg_abs_grad.size(), 0);
    out.mask.fraction = r;
    const int k = static_cast<int>(std::ceil(r * dim));
    for (int i = 0; i < k; ++i) out.mask.bits[std::size_t(order[std::size_t(i)])] = 1;

    out.curve.r.resize(std::size_t(dim) + 1);
    out.curve.captured.resize(std::size_t(dim) + 1);
    double run = 0.0;
    out.curve.r[0] = 0.0;
    out.curve.captured[0] = 0.0;
    for (int i = 0; i < dim; ++i) {
        run += avg_abs_grad[std::size_t(order[std::size_t(i)])];
        out.curve.r[std::size_t(i) + 1] = double(i + 1) / dim;
        out.curve.captured[std::size_t(i) + 1] = run / total;
    }
    return out;
}

Mask lcei_default_mask(int num_qubits) {
    if (num_qubits < 1) throw std::invalid_argument("lcei_default_mask: bad qubit count");
    const int k = static_cast<int>(std::round(0.4 * num_qubits));
    const int start = (num_qubits - k) / 2;
    Mask m;
    m.bits.assign(static_cast<std::size_t>(num_qubits), 0);
    for (int i = start; i < start + k; ++i) m.bits[std::size_t(i)] = 1;
    m.fraction = double(k) / num_qubits;
    return m;
}

std::vector<double> mask_fgsm(const std::vector<double>& x, const Mask& mask, double eps,
                              const std::vector<double>& grad) {
    check_dim(mask, x.size(), "mask_fgsm");
    if (grad.size() != x.size())
        throw std::invalid_argument("mask_fgsm: gradient dimension mismatch");
    if (eps < 0.0) throw std::invalid_argument("mask_fgsm: eps must be >= 0");
    std::vector<double> adv = x;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (mask.bits[i]) adv[i] += eps * sign(grad[i]);
    return adv;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (points < 2 || !(hi > lo)) throw std::invalid_argument("uniform_grid: bad range");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[std::size_t(i)] = lo + (hi - lo) * double(i) / (points - 1);
    g.front() = lo;
    g.back() = hi;
    return g;
}

SweepResult attack_sweep(const Model& m, std::span<const double> theta,
                         const std::vector<Sample>& samples, const Mask& mask,
                         const std::vector<double>& eps_hat_grid, double feature_width,
                         GradEngine engine, bool with_infidelity) {
    if (samples.empty()) throw std::invalid_argument("attack_sweep: no samples");
    if (eps_hat_grid.empty() || eps_hat_grid.front() != 0.0)
        throw std::invalid_argument("attack_sweep: grid must start at 0");
    for (std::size_t i = 1; i < eps_hat_grid.size(); ++i)
        if (!(eps_hat_grid[i] > eps_hat_grid[i - 1]))
            throw std::invalid_argument("attack_sweep: grid must increase strictly");
    if (!(feature_width > 0.0))
        throw std::invalid_argument("attack_sweep: feature width must be positive");

    SweepResult out;
    out.eps_grid = eps_hat_grid;
    out.accuracy.assign(eps_hat_grid.size(), 0.0);
    out.has_infidelity = with_infidelity;
    out.curves.resize(samples.size());

    parallel_for(samples.size(), [&](std::size_t k) {
        const Sample& s = samples[k];
        AttackCurve& curve = out.curves[k];
        curve.sample_id = s.id;
        curve.label = s.label;

        const std::vector<double> grad =
            input_gradient(m, theta, s.features, s.label, engine, &mask.bits);
        const StateVector psi_clean = run_circuit(m.circuit, theta, s.features);
        const Density1Q rho = reduced_density(psi_clean, m.output_qubit);

        for (std::size_t i = 0; i < eps_hat_grid.size(); ++i) {
            const double eps = eps_hat_grid[i] * feature_width;
            const std::vector<double> adv = mask_fgsm(s.features, mask, eps, grad);
            const StateVector psi = run_circuit(m.circuit, theta, adv);
            const double p1 = (1.0 + psi.expectation_z(m.output_qubit)) / 2.0;

            AttackPoint pt;
            pt.eps_hat = eps_hat_grid[i];
            pt.p_correct = p_correct(p1, s.label);
            pt.correct = is_correct(p1, s.label);
            if (with_infidelity)
                pt.infidelity = infidelity(rho, reduced_density(psi, m.output_qubit));
            curve.points.push_back(pt);
        }
    });
    for (const AttackCurve& curve : out.curves)
        for (std::size_t i = 0; i < curve.points.size(); ++i)
            if (curve.points[i].correct) out.accuracy[i] += 1.0;
    for (double& a : out.accuracy) a /= static_cast<double>(samples.size());
    return out;
}

std::vector<Sample> make_adversarial_set(const Model& m, std::span<const double> theta,
                                         const std::vector<Sample>& samples, const Mask& mask,
                                         double eps_hat, double feature_width,
                                         GradEngine engine) {
    if (!(feature_width > 0.0))
        throw std::invalid_argument("make_adversarial_set: feature width must be positive");
    std::vector<Sample> adv(samples.size());
    const double eps = eps_hat * feature_width;
    parallel_for(samples.size(), [&](std::size_t k) {
        const Sample& s = samples[k];
        const std::vector<double> grad =
            input_gradient(m, theta, s.features, s.label, engine, &mask.bits);
        adv[k] = s;
        adv[k].features = mask_fgsm(s.features, mask, eps, grad);
    });
    return adv;
}

}  // namespace qrob
