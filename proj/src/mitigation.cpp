#include "qrob/mitigation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qrob {
namespace {

void check_simplex(std::span<const double> v, const char* what) {
    if (v.empty()) throw std::invalid_argument(std::string(what) + ": empty distribution");
    double sum = 0.0;
    for (double p : v) {
        if (!(p >= 0.0))
            throw std::invalid_argument(std::string(what) + ": negative or NaN entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw std::invalid_argument(std::string(what) + ": entries sum to " +
                                    std::to_string(sum) + ", not 1");
}

void check_matrix(const AssignmentMatrix& R) {
    if (R.qubits < 1 || R.r.size() != R.dim() * R.dim())
        throw std::invalid_argument("assignment matrix: bad shape");
    for (std::size_t i = 0; i < R.dim(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < R.dim(); ++j) {
            const double e = R.at(i, j);
            if (!(e >= 0.0) || e > 1.0)
                throw std::invalid_argument("assignment matrix: entry outside [0, 1]");
            row += e;
        }
        if (std::abs(row - 1.0) > 1e-12)
            throw std::invalid_argument("assignment matrix: row " + std::to_string(i) +
                                        " sums to " + std::to_string(row));
    }
}

}  // namespace

AssignmentMatrix identity_assignment(int qubits) {
    if (qubits < 1) throw std::invalid_argument("identity_assignment: qubits < 1");
    AssignmentMatrix R;
    R.qubits = qubits;
    R.r.assign(R.dim() * R.dim(), 0.0);
    for (std::size_t i = 0; i < R.dim(); ++i) R.at(i, i) = 1.0;
    return R;
}

AssignmentMatrix single_qubit_assignment(double f0, double f1) {
    if (!(f0 >= 0.0) || f0 > 1.0 || !(f1 >= 0.0) || f1 > 1.0)
        throw std::invalid_argument("single_qubit_assignment: fidelity outside [0, 1]");
    AssignmentMatrix R;
    R.qubits = 1;
    R.r = {f0, 1.0 - f0, 1.0 - f1, f1};
    return R;
}

AssignmentMatrix tensor_assignment(const AssignmentMatrix& hi, const AssignmentMatrix& lo) {
    check_matrix(hi);
    check_matrix(lo);
    AssignmentMatrix R;
    R.qubits = hi.qubits + lo.qubits;
    const std::size_t dh = hi.dim(), dl = lo.dim();
    R.r.assign(R.dim() * R.dim(), 0.0);
    for (std::size_t ih = 0; ih < dh; ++ih)
        for (std::size_t il = 0; il < dl; ++il)
            for (std::size_t jh = 0; jh < dh; ++jh)
                for (std::size_t jl = 0; jl < dl; ++jl)
                    R.at(ih * dl + il, jh * dl + jl) = hi.at(ih, jh) * lo.at(il, jl);
    return R;
}

std::vector<double> apply_assignment(std::span<const double> v, const AssignmentMatrix& R) {
    check_matrix(R);
    check_simplex(v, "apply_assignment");
    if (v.size() != R.dim())
        throw std::invalid_argument("apply_assignment: dimension mismatch");
    std::vector<double> w(R.dim(), 0.0);
    for (std::size_t i = 0; i < R.dim(); ++i)
        for (std::size_t j = 0; j < R.dim(); ++j) w[j] += v[i] * R.at(i, j);
    return w;
}

std::vector<std::uint64_t> apply_readout_noise(std::span<const double> true_dist,
                                               const AssignmentMatrix& R,
                                               std::uint64_t shots, Rng& rng) {
    if (shots < 1) throw std::invalid_argument("apply_readout_noise: shots < 1");
    const std::vector<double> w = apply_assignment(true_dist, R);
    std::vector<double> cdf(w.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        acc += w[j];
        cdf[j] = acc;
    }
    cdf.back() = 1.0;  // close the roundoff gap so every draw lands
    std::vector<std::uint64_t> counts(w.size(), 0);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform();
        std::size_t j = 0;
        while (j + 1 < cdf.size() && u >= cdf[j]) ++j;
        ++counts[j];
    }
    return counts;
}

std::vector<double> counts_to_dist(std::span<const std::uint64_t> counts) {
    if (counts.empty()) throw std::invalid_argument("counts_to_dist: empty counts");
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    if (total == 0) throw std::invalid_argument("counts_to_dist: zero total");
    std::vector<double> dist(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j)
        dist[j] = double(counts[j]) / double(total);
    return dist;
}

IbuResult ibu_correct(std::span<const double> w, const AssignmentMatrix& R, int max_iter,
                      std::span<const double> prior) {
    check_matrix(R);
    check_simplex(w, "ibu_correct");
    if (w.size() != R.dim()) throw std::invalid_argument("ibu_correct: dimension mismatch");
    if (max_iter < 1) throw std::invalid_argument("ibu_correct: max_iter < 1");

    const std::size_t n = R.dim();
    IbuResult res;
    if (prior.empty()) {
        res.v.assign(n, 1.0 / double(n));
    } else {
        check_simplex(prior, "ibu_correct prior");
        if (prior.size() != n) throw std::invalid_argument("ibu_correct: prior size");
        res.v.assign(prior.begin(), prior.end());
    }

    std::vector<double> pred(n), next(n);
    for (int it = 0; it < max_iter; ++it) {
        // predicted measurement distribution under the current estimate
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += R.at(k, j) * res.v[k];
            pred[j] = s;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (w[j] == 0.0) continue;  // no evidence for outcome j
                if (pred[j] <= 0.0)
                    throw std::runtime_error(
                        "ibu_correct: outcome " + std::to_string(j) +
                        " observed but unreachable under the assignment matrix");
                s += R.at(i, j) * w[j] / pred[j];
            }
            next[i] = res.v[i] * s;
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            delta = std::max(delta, std::abs(next[i] - res.v[i]));
        res.v = next;
        res.delta = delta;
        res.iterations = it + 1;
        if (delta == 0.0) break;  // exact fixed point, nothing left to move
    }
    return res;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size() || p.empty())
        throw std::invalid_argument("total_variation: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

}  // namespace qrob
