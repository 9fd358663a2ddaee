#include "qrob/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qrob/density.hpp"
#include "qrob/parallel.hpp"
#include "qrob/rng.hpp"

namespace qrob {
namespace {

constexpr double kPi = 3.14159265358979323846;

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

struct Probe {
    double infid = 0.0;
    bool same_class = false;
};

}  // namespace

double sensitivity(double p_clean, double p_adv, double eps_hat) {
    if (!(eps_hat > 0.0)) throw std::invalid_argument("sensitivity: eps_hat must be positive");
    return (p_clean - p_adv) / eps_hat;
}

double robustness_score(double s) { return 1.0 / (1.0 + std::exp(s)); }

double adv_robustness(std::span<const double> s_values) {
    if (s_values.empty()) throw std::invalid_argument("adv_robustness: empty input");
    double acc = 0.0;
    for (double s : s_values) acc += robustness_score(s);
    return acc / double(s_values.size());
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: size mismatch");
    const std::size_t n = xs.size();
    if (n < 3) throw std::invalid_argument("pearson: need at least 3 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        throw std::invalid_argument("pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<SensitivityRecord> sensitivity_records(const Model& m,
                                                   std::span<const double> theta,
                                                   const std::vector<Sample>& samples,
                                                   const Mask& mask, double feature_width,
                                                   const SensitivityConfig& cfg) {
    if (samples.empty()) throw std::invalid_argument("sensitivity_records: no samples");
    if (!(cfg.eps_hat > 0.0) || !(cfg.slope_range > 0.0) || cfg.slope_points < 3)
        throw std::invalid_argument("sensitivity_records: bad config");
    if (mask.bits.size() != std::size_t(m.num_features()))
        throw std::invalid_argument("sensitivity_records: mask dimension mismatch");

    const std::vector<double> grid = uniform_grid(0.0, cfg.slope_range, cfg.slope_points);

    std::vector<SensitivityRecord> out(samples.size());
    parallel_for(samples.size(), [&](std::size_t k) {
        const Sample& s = samples[k];
        const std::vector<double> g =
            input_gradient(m, theta, s.features, s.label, cfg.engine);

        // masked FGSM direction, unit strength
        std::vector<double> dir(g.size(), 0.0);
        double dir_norm = 0.0, g_norm = 0.0, dot = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (mask.bits[j]) dir[j] = sgn(g[j]);
            dir_norm += dir[j] * dir[j];
            g_norm += g[j] * g[j];
            dot += dir[j] * g[j];
        }

        auto p_at = [&](double eps_hat) {
            std::vector<double> x = s.features;
            const double eps = eps_hat * feature_width;
            for (std::size_t j = 0; j < x.size(); ++j) x[j] += eps * dir[j];
            return p_correct(predict(m, theta, x).p, s.label);
        };

        SensitivityRecord rec;
        rec.sample_id = s.id;
        rec.label = s.label;
        rec.p_clean = p_correct(predict(m, theta, s.features).p, s.label);
        rec.eps_hat = cfg.eps_hat;
        rec.delta_p = rec.p_clean - p_at(cfg.eps_hat);
        rec.s_point = sensitivity(rec.p_clean, rec.p_clean - rec.delta_p, cfg.eps_hat);

        // OLS slope of p against eps_hat over the grid; S is its negative
        double mx = 0.0, my = 0.0;
        std::vector<double> ps(grid.size());
        ps[0] = rec.p_clean;
        for (std::size_t i = 1; i < grid.size(); ++i) ps[i] = p_at(grid[i]);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            mx += grid[i];
            my += ps[i];
        }
        mx /= double(grid.size());
        my /= double(grid.size());
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            sxx += (grid[i] - mx) * (grid[i] - mx);
            sxy += (grid[i] - mx) * (ps[i] - my);
        }
        rec.s_slope = -sxy / sxx;

        rec.cosine_sim = (dir_norm > 0.0 && g_norm > 0.0)
                             ? dot / (std::sqrt(dir_norm) * std::sqrt(g_norm))
                             : 0.0;
        out.push_back(rec);
    }
    return out;
}

double r_lb(double p1, double p2) {
    if (p1 < 0.0 || p1 > 1.0 || p2 < 0.0 || p2 > 1.0)
        throw std::invalid_argument("r_lb: probabilities outside [0, 1]");
    if (std::abs(p1 + p2 - 1.0) > 1e-9)
        throw std::invalid_argument("r_lb: p1 + p2 must be 1 for the binary task");
    if (p1 < p2)
        throw std::invalid_argument("r_lb: sample already misclassified (p1 < p2)");
    const double d = std::sqrt(p1) - std::sqrt(p2);
    return 0.5 * d * d;
}

double v_star(double p1, double p2) { return std::sqrt(1.0 - r_lb(p1, p2)); }

const char* to_string(BoundStatus s) {
    switch (s) {
        case BoundStatus::Ok: return "ok";
        case BoundStatus::Misclassified: return "misclassified";
        case BoundStatus::NoCrossing: return "no-crossing";
        case BoundStatus::FitFailed: return "fit-failed";
    }
    return "?";
}

std::vector<BoundRecord> extract_bounds(const SweepResult& sweep, double rmse_gate) {
    if (!sweep.has_infidelity)
        throw std::invalid_argument("extract_bounds: sweep lacks infidelities");
    if (sweep.eps_grid.size() < 5)
        throw std::invalid_argument("extract_bounds: sweep grid too small to fit");

    std::vector<BoundRecord> out;
    out.reserve(sweep.curves.size());
    for (const AttackCurve& c : sweep.curves) {
        BoundRecord rec;
        rec.sample_id = c.sample_id;
        rec.label = c.label;
        rec.p1 = c.points.front().p_correct;
        rec.p2 = 1.0 - rec.p1;

        if (!(rec.p1 > 0.5)) {
            rec.status = BoundStatus::Misclassified;
            out.push_back(rec);
            continue;
        }
        rec.lb = r_lb(rec.p1, rec.p2);

        std::vector<double> ps, ds;
        ps.reserve(c.points.size());
        ds.reserve(c.points.size());
        for (const AttackPoint& pt : c.points) {
            ps.push_back(pt.p_correct);
            ds.push_back(pt.infidelity);
        }
        rec.p_fit = fit_cos2(sweep.eps_grid, ps);
        rec.d_fit = fit_cos2(sweep.eps_grid, ds);
        if (!rec.p_fit.converged || rec.p_fit.rmse > rmse_gate) {
            rec.status = BoundStatus::FitFailed;
            out.push_back(rec);
            continue;
        }

        // no crossing is decided by the response fit alone; the infidelity
        // fit only matters once there is a crossing to evaluate it at
        const std::optional<double> cross = smallest_crossing(rec.p_fit, 0.5);
        if (!cross || *cross > sweep.eps_grid.back()) {
            rec.status = BoundStatus::NoCrossing;
            out.push_back(rec);
            continue;
        }
        if (!rec.d_fit.converged || rec.d_fit.rmse > rmse_gate) {
            rec.status = BoundStatus::FitFailed;
            out.push_back(rec);
            continue;
        }
        rec.eps_star = *cross;
        rec.ub = std::max(0.0, rec.d_fit(rec.eps_star));
        // an upper bound below the lower bound by more than the combined fit
        // residuals means at least one fit is wrong: flag, do not keep
        if (rec.ub < rec.lb - (rec.p_fit.rmse + rec.d_fit.rmse + 1e-9))
            rec.status = BoundStatus::FitFailed;
        else
            rec.status = BoundStatus::Ok;
        out.push_back(rec);
    }
    return out;
}

std::vector<BoundRecord> critical_samples(const std::vector<BoundRecord>& records,
                                          double fraction) {
    if (records.empty()) throw std::invalid_argument("critical_samples: empty input");
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("critical_samples: fraction outside (0, 1]");
    std::vector<BoundRecord> valid;
    for (const BoundRecord& r : records)
        if (r.status != BoundStatus::Misclassified) valid.push_back(r);
    if (valid.empty()) throw std::invalid_argument("critical_samples: no defined bounds");
    std::sort(valid.begin(), valid.end(), [](const BoundRecord& a, const BoundRecord& b) {
        if (a.lb != b.lb) return a.lb < b.lb;
        return a.sample_id < b.sample_id;
    });
    const std::size_t k =
        std::max<std::size_t>(1, std::size_t(std::floor(fraction * double(valid.size()))));
    valid.resize(std::min(k, valid.size()));
    return valid;
}

SoundnessResult verify_lb_soundness(const Model& m, std::span<const double> theta,
                                    const Sample& sample, int trials, std::uint64_t seed) {
    if (trials < 0) throw std::invalid_argument("verify_lb_soundness: negative trials");

    const Prediction clean = predict(m, theta, sample.features);
    if (!is_correct(clean.p, sample.label))
        throw std::invalid_argument("verify_lb_soundness: sample must be correctly classified");

    const double p1 = p_correct(clean.p, sample.label);
    SoundnessResult res;
    res.lb = r_lb(p1, 1.0 - p1);
    if (res.lb <= 0.0 || trials == 0) return res;  // nothing can qualify

    const StateVector psi_clean = run_circuit(m.circuit, theta, sample.features);
    const Density1Q rho = reduced_density(psi_clean, m.output_qubit);

    Rng rng = Rng::substream(seed, "attack-oracle", std::uint64_t(sample.id));
    const std::size_t d = sample.features.size();

    auto probe = [&](const std::vector<double>& direction, double mag) {
        std::vector<double> x = sample.features;
        for (std::size_t j = 0; j < d; ++j) x[j] += mag * direction[j];
        const StateVector psi = run_circuit(m.circuit, theta, x);
        Probe out;
        out.infid = infidelity(rho, reduced_density(psi, m.output_qubit));
        const double p = (1.0 + psi.expectation_z(m.output_qubit)) / 2.0;
        out.same_class = (p > 0.5) == (clean.p > 0.5);
        return out;
    };

    for (int trial = 0; trial < trials; ++trial) {
        // uniform random direction (normalized Gaussian draw)
        std::vector<double> dir(d);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (double& v : dir) {
                v = rng.normal();
                norm += v * v;
            }
        } while (!(norm > 1e-24));
        norm = std::sqrt(norm);
        for (double& v : dir) v /= norm;

        // grow the magnitude until the infidelity reaches lb (or give up at
        // the cap, where the perturbation qualifies trivially)
        double lo = 0.0;
        double hi = 0.0;
        double mag = 1e-3;
        const double cap = 4.0 * kPi;  // far beyond any feature range
        bool bracketed = false;
        while (mag <= cap) {
            if (probe(dir, mag).infid >= res.lb) {
                hi = mag;
                bracketed = true;
                break;
            }
            lo = mag;
            mag *= 2.0;
        }

        if (bracketed) {
            // bisect toward the boundary, keep the qualifying side
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (probe(dir, mid).infid < res.lb)
                    lo = mid;
                else
                    hi = mid;
            }
        }
        if (lo <= 0.0) continue;  // boundary hit at the very first probe

        const Probe final = probe(dir, lo);
        if (final.infid < res.lb) {
            ++res.qualifying;
            if (!final.same_class) ++res.violations;
        }
    }
    return res;
}

}  // namespace qrob
