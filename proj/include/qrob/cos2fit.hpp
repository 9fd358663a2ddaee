#pragma once

#include <optional>
#include <vector>

namespace qrob {

// y(x) = a * cos^2(omega * x + phi) + b, canonicalized to a >= 0, omega > 0,
// phi in [0, pi). Exactly constant data degenerates to a = 0, omega = phi = 0.
struct CosSqFit {
    double a = 0.0;
    double omega = 0.0;
    double phi = 0.0;
    double b = 0.0;
    double rmse = 0.0;    // sqrt(mean squared residual)
    bool converged = false;

    double operator()(double x) const;
};

// Least squares via damped Gauss-Newton (Levenberg-Marquardt) with a
// multistart grid over omega and phi; amplitude and offset are seeded by a
// linear solve at each start. Needs >= 5 points and strictly increasing xs.
// Non-convergence is reported through `converged` and the residual, never
// thrown.
CosSqFit fit_cos2(const std::vector<double>& xs, const std::vector<double>& ys);

// Smallest x > 0 with fit(x) == level, via the arccos closed form; empty when
// the curve never attains the level (or the fit is degenerate).
std::optional<double> smallest_crossing(const CosSqFit& fit, double level);

}  // namespace qrob
