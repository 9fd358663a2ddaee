#pragma once

#include <cstdint>
#include <optional>

#include "qrob/model.hpp"

namespace qrob {

// How per-sample gradients are evaluated.
//  Psr     - two shifted circuit executions per parameter slot, exactly the
//            procedure a shot-based device would run (2P evaluations for a
//            full theta gradient, 2*popcount(mask) for a masked input one).
//  Adjoint - single forward/backward statevector sweep returning the same
//            derivatives (the shift rule is exact, so both engines agree to
//            rounding; a property test pins them together at 1e-12).
enum class GradEngine { Psr, Adjoint };

GradEngine grad_engine_from_string(std::string_view s);
const char* to_string(GradEngine e);

struct LossGradient {
    double loss = 0.0;
    double p = 0.0;            // class-1 probability at the evaluation point
    double expectation = 0.0;  // <sigma_z>
    std::vector<double> dtheta;  // dL/dtheta, size P
    std::vector<double> dx;      // dL/dx, size d; empty unless requested
};

// d<sigma_z>/dtheta_i for every trainable slot, by the +-pi/2 shift rule.
std::vector<double> psr_expectation_gradient(const Model& m,
                                             std::span<const double> theta,
                                             std::span<const double> x);

// Cross-entropy loss and its gradient w.r.t. theta (and optionally x).
LossGradient loss_gradient(const Model& m, std::span<const double> theta,
                           std::span<const double> x, int label,
                           GradEngine engine, bool want_input_grad = false);

// dL/dx only. When mask is given, components with mask[j] == 0 are skipped
// (returned as 0) and cost only the masked shifts under the Psr engine.
std::vector<double> input_gradient(const Model& m, std::span<const double> theta,
                                   std::span<const double> x, int label,
                                   GradEngine engine,
                                   const std::vector<std::uint8_t>* mask = nullptr);

}  // namespace qrob
