#include "qrob/cos2fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qrob {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Solve M x = rhs for a 4x4 system, Gaussian elimination with partial
// pivoting. Returns false when the pivot collapses.
bool solve4(std::array<std::array<double, 4>, 4> M, std::array<double, 4> rhs,
            std::array<double, 4>& x) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        if (std::abs(M[piv][col]) < 1e-300) return false;
        std::swap(M[piv], M[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = col + 1; r < 4; ++r) {
            const double f = M[r][col] / M[col][col];
            for (int c = col; c < 4; ++c) M[r][c] -= f * M[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = 3; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < 4; ++c) acc -= M[r][c] * x[c];
        x[r] = acc / M[r][r];
    }
    return true;
}

double ssr_of(const std::vector<double>& xs, const std::vector<double>& ys, double a,
              double omega, double phi, double b) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double c = std::cos(omega * xs[i] + phi);
        const double r = ys[i] - (a * c * c + b);
        ssr += r * r;
    }
    return ssr;
}

// Linear least squares for (a, b) at fixed (omega, phi).
void seed_amplitude(const std::vector<double>& xs, const std::vector<double>& ys, double omega,
                    double phi, double& a, double& b) {
    const std::size_t n = xs.size();
    double cm = 0.0, ym = 0.0;
    std::vector<double> cs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(omega * xs[i] + phi);
        cs[i] = c * c;
        cm += cs[i];
        ym += ys[i];
    }
    cm /= double(n);
    ym /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (cs[i] - cm) * (cs[i] - cm);
        sxy += (cs[i] - cm) * (ys[i] - ym);
    }
    a = sxx > 1e-14 ? sxy / sxx : 0.0;
    b = ym - a * cm;
}

struct Params {
    double a, omega, phi, b;
};

// One Levenberg-Marquardt descent from a start point. Returns final SSR.
double refine(const std::vector<double>& xs, const std::vector<double>& ys, Params& p,
              bool& settled) {
    const std::size_t n = xs.size();
    double ssr = ssr_of(xs, ys, p.a, p.omega, p.phi, p.b);
    double lambda = 1e-3;
    settled = false;
    for (int iter = 0; iter < 200; ++iter) {
        std::array<std::array<double, 4>, 4> M{};
        std::array<double, 4> g{};
        for (std::size_t i = 0; i < n; ++i) {
            const double u = p.omega * xs[i] + p.phi;
            const double c = std::cos(u);
            const double s2 = std::sin(2.0 * u);
            const double r = ys[i] - (p.a * c * c + p.b);
            const std::array<double, 4> row{c * c, -p.a * s2 * xs[i], -p.a * s2, 1.0};
            for (int j = 0; j < 4; ++j) {
                g[j] += row[j] * r;
                for (int k = 0; k < 4; ++k) M[j][k] += row[j] * row[k];
            }
        }
        bool stepped = false;
        for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
            std::array<std::array<double, 4>, 4> Md = M;
            for (int j = 0; j < 4; ++j) Md[j][j] += lambda * std::max(M[j][j], 1e-12);
            std::array<double, 4> d{};
            if (solve4(Md, g, d)) {
                const Params trial{p.a + d[0], p.omega + d[1], p.phi + d[2], p.b + d[3]};
                const double trial_ssr =
                    ssr_of(xs, ys, trial.a, trial.omega, trial.phi, trial.b);
                if (trial_ssr <= ssr) {
                    const double drop = ssr - trial_ssr;
                    p = trial;
                    ssr = trial_ssr;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    stepped = true;
                    if (drop <= 1e-15 * (ssr + 1e-30)) {
                        settled = true;
                        return ssr;
                    }
                    break;
                }
            }
            lambda *= 10.0;
            if (lambda > 1e12) {
                settled = true;  // stuck at a (local) minimum
                return ssr;
            }
        }
        if (!stepped) {
            settled = true;
            return ssr;
        }
    }
    return ssr;
}

CosSqFit canonicalize(Params p, double rmse, bool converged) {
    if (p.omega < 0.0) {
        p.omega = -p.omega;
        p.phi = -p.phi;
    }
    if (p.a < 0.0) {
        // -|a| cos^2(u) + b == |a| cos^2(u + pi/2) + b - |a|
        p.b += p.a;
        p.a = -p.a;
        p.phi += kPi / 2.0;
    }
    if (p.a == 0.0) {
        p.omega = 0.0;
        p.phi = 0.0;
    } else {
        p.phi = std::fmod(p.phi, kPi);
        if (p.phi < 0.0) p.phi += kPi;
        if (p.phi >= kPi) p.phi = 0.0;  // fmod rounding at the seam
    }
    CosSqFit fit;
    fit.a = p.a;
    fit.omega = p.omega;
    fit.phi = p.phi;
    fit.b = p.b;
    fit.rmse = rmse;
    fit.converged = converged;
    return fit;
}

}  // namespace

double CosSqFit::operator()(double x) const {
    const double c = std::cos(omega * x + phi);
    return a * c * c + b;
}

CosSqFit fit_cos2(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_cos2: size mismatch");
    if (xs.size() < 5) throw std::invalid_argument("fit_cos2: need at least 5 points");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("fit_cos2: xs must increase strictly");

    const std::size_t n = xs.size();
    double ym = 0.0;
    for (double y : ys) ym += y;
    ym /= double(n);
    double var = 0.0;
    for (double y : ys) var += (y - ym) * (y - ym);

    // exactly constant input: degenerate amplitude, rmse is the sample spread
    if (var == 0.0) {
        CosSqFit fit;
        fit.b = ym;
        fit.converged = true;
        return fit;
    }

    const double x_range = xs.back() - xs.front();
    const double base = kPi / x_range;
    const double omega_factors[] = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
    const double phi_starts[] = {0.0, kPi / 4.0, kPi / 2.0, 3.0 * kPi / 4.0};

    double best_ssr = std::numeric_limits<double>::infinity();
    Params best{0.0, 0.0, 0.0, ym};
    bool best_settled = false;

    for (double f : omega_factors) {
        for (double phi0 : phi_starts) {
            Params p{0.0, f * base, phi0, 0.0};
            seed_amplitude(xs, ys, p.omega, p.phi, p.a, p.b);
            bool settled = false;
            const double ssr = refine(xs, ys, p, settled);
            if (ssr < best_ssr) {
                best_ssr = ssr;
                best = p;
                best_settled = settled;
            }
        }
    }

    const double rmse = std::sqrt(best_ssr / double(n));
    // Converged means the descent settled, or the residual is a negligible
    // slice of the data variance. The second clause matters for near-linear
    // data: the family tracks it along the omega -> 0 valley where SSR keeps
    // creeping down and the relative-drop stop never fires.
    const bool ok =
        (best_settled || best_ssr <= 1e-9 * var) && std::isfinite(best_ssr);
    return canonicalize(best, rmse, ok);
}

std::optional<double> smallest_crossing(const CosSqFit& fit, double level) {
    if (!(fit.a > 0.0) || !(fit.omega > 0.0)) return std::nullopt;
    double c = (level - fit.b) / fit.a;
    if (c < -1e-12 || c > 1.0 + 1e-12) return std::nullopt;
    c = std::clamp(c, 0.0, 1.0);
    const double alpha = std::acos(std::sqrt(c));  // in [0, pi/2]

    // cos^2(u) == c at u = +-alpha + k*pi; x = (u - phi) / omega
    double best = std::numeric_limits<double>::infinity();
    const int k0 = int(std::floor((fit.phi - alpha) / kPi)) - 1;
    for (int k = k0; k < k0 + 4; ++k) {
        for (double s : {+1.0, -1.0}) {
            const double u = s * alpha + double(k) * kPi;
            const double x = (u - fit.phi) / fit.omega;
            if (x > 1e-12 && x < best) best = x;
        }
    }
    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

}  // namespace qrob
