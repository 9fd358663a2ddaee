#include "qrob/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace qrob {
namespace {

void check_params(const NoiseParams& p) {
    if (!(p.t1 > 0.0) || !(p.t2 > 0.0) || !(p.t >= 0.0))
        throw std::invalid_argument("noise: T1, T2 must be positive and t >= 0");
}

void check_rate(double g, const char* who) {
    if (g < 0.0 || g > 1.0) throw std::invalid_argument(std::string(who) + ": rate outside [0, 1]");
}

}  // namespace

double population_factor(const NoiseParams& p) {
    check_params(p);
    return std::exp(-p.t / p.t1);
}

double coherence_factor(const NoiseParams& p) {
    check_params(p);
    return std::exp(-p.t / (2.0 * p.t1) - p.t / (2.0 * p.t2));
}

Density1Q amplitude_damp(const Density1Q& rho, double gamma) {
    check_rate(gamma, "amplitude_damp");
    const double keep = std::sqrt(1.0 - gamma);
    Density1Q out;
    out(0, 0) = rho(0, 0) + gamma * rho(1, 1);
    out(0, 1) = keep * rho(0, 1);
    out(1, 0) = keep * rho(1, 0);
    out(1, 1) = (1.0 - gamma) * rho(1, 1);
    return out;
}

Density1Q phase_damp(const Density1Q& rho, double lambda) {
    check_rate(lambda, "phase_damp");
    const double keep = std::sqrt(1.0 - lambda);
    Density1Q out = rho;
    out(0, 1) = keep * rho(0, 1);
    out(1, 0) = keep * rho(1, 0);
    return out;
}

Density1Q apply_decoherence(const Density1Q& rho, const NoiseParams& p) {
    check_params(p);
    const double gamma = 1.0 - std::exp(-p.t / p.t1);
    const double lambda = 1.0 - std::exp(-p.t / p.t2);
    return amplitude_damp(phase_damp(rho, lambda), gamma);
}

DeltaP noise_delta_p(const Density1Q& rho, const Density1Q& sigma, const NoiseParams& p) {
    const Density1Q nr = apply_decoherence(rho, p);
    const Density1Q ns = apply_decoherence(sigma, p);
    DeltaP d;
    d.clean = (rho(0, 0) - sigma(0, 0)).real();
    d.noisy = (nr(0, 0) - ns(0, 0)).real();
    return d;
}

BasisDeltaP noise_delta_p_basis(const Density1Q& rho, const Density1Q& sigma,
                                const NoiseParams& p, double beta, double delta) {
    check_params(p);
    const double c = std::cos(beta);
    const double s = std::sin(beta);
    const cplx phase(std::cos(delta), std::sin(delta));

    BasisDeltaP out;
    const double dpop = (rho(0, 0) - sigma(0, 0)).real();
    const cplx dcoh = rho(0, 1) - sigma(0, 1);
    out.population_part = (c * c - s * s) * dpop;
    out.coherence_part = 2.0 * c * s * (phase * dcoh).real();
    out.clean = out.population_part + out.coherence_part;
    out.noisy = population_factor(p) * out.population_part +
                coherence_factor(p) * out.coherence_part;
    return out;
}

}  // namespace qrob
