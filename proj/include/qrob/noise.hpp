#pragma once

#include "qrob/density.hpp"

namespace qrob {

// Relaxation / dephasing model for the output qubit. t is the effective
// circuit duration the state sits exposed to the environment.
struct NoiseParams {
    double t1 = 19.57e-6;
    double t2 = 2.29e-6;
    double t = 1.6e-6;

    // Relaxation alone already dephases at e^{-t/(2 T1)}; a total coherence
    // decay faster than that plus pure dephasing needs 2 T1 >= T2 when T2 is
    // read as a total-T2. Here t2 acts as a pure-dephasing time, so this is
    // only a plausibility signal, not a hard error.
    bool physical() const { return 2.0 * t1 >= t2; }
};

// Population survival e^{-t/T1}.
double population_factor(const NoiseParams& p);
// Coherence survival e^{-t/(2 T1)} * e^{-t/(2 T2)}.
double coherence_factor(const NoiseParams& p);

// Amplitude damping with gamma = 1 - e^{-t/T1}:
// rho00 += gamma rho11, rho11 *= 1-gamma, coherences *= sqrt(1-gamma).
Density1Q amplitude_damp(const Density1Q& rho, double gamma);

// Phase damping with lambda = 1 - e^{-t/T2}: coherences *= sqrt(1-lambda).
Density1Q phase_damp(const Density1Q& rho, double lambda);

// The composite channel for the given parameters (the two channels commute
// on this parameterization).
Density1Q apply_decoherence(const Density1Q& rho, const NoiseParams& p);

struct DeltaP {
    double clean = 0.0;  // rho00 - sigma00
    double noisy = 0.0;  // same after the channel; equals clean * e^{-t/T1}
};

// Probability-change contrast between two states under computational-basis
// readout, before and after decoherence.
DeltaP noise_delta_p(const Density1Q& rho, const Density1Q& sigma, const NoiseParams& p);

struct BasisDeltaP {
    double population_part = 0.0;  // A: (cos^2 b - sin^2 b) (rho00 - sigma00)
    double coherence_part = 0.0;   // B: 2 cos b sin b Re(e^{i d} (rho01 - sigma01))
    double clean = 0.0;            // A + B
    double noisy = 0.0;            // e^{-t/T1} A + e^{-t/(2T1)-t/(2T2)} B
};

// Measurement basis |b> = cos(beta)|0> + e^{i delta} sin(beta)|1>. The noisy
// contrast decomposes into the population and coherence parts with their own
// decay factors; beta = pi/4, delta = 0 is the Hadamard basis (pure B term).
BasisDeltaP noise_delta_p_basis(const Density1Q& rho, const Density1Q& sigma,
                                const NoiseParams& p, double beta, double delta);

}  // namespace qrob
