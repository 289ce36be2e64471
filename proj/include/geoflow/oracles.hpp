#pragma once

#include <utility>
#include <vector>

#include "geoflow/flow.hpp"

namespace geoflow {

/// Exact evolution of u_t = u_xxx on a flat target: per mode,
/// u_hat_k(t) = exp(-i k^3 t) u_hat_k(0). The Nyquist coefficient is left
/// unchanged (its rotation is not representable in a real series; all stated
/// inputs are band-limited below it). Throws unless the target is flat.
MapState airy_exact(const MapState& u0, double t);

/// Independent covariant derivative on the unit 2-sphere through a
/// stereographic chart: map to chart coordinates, differentiate the
/// components spectrally, add the conformal-metric Christoffel terms, and
/// push back to ambient coordinates. The chart pole is picked as the
/// direction farthest from the loop (or can be forced via `pole`); every
/// node must stay at chordal distance >= 0.2 from it.
TangentField chart_cov_deriv(const MapState& u, const TangentField& V, const Vec& pole = {});

enum class Functional { E1, E2, E3 };
std::string to_string(Functional f);

struct AuditSample {
    double t = 0.0;
    double fd = 0.0;       // centered finite difference of the recorded series
    double formula = 0.0;  // closed-form rate (0 for the conserved functionals)
};

struct AuditResult {
    Functional functional = Functional::E1;
    double max_drift = 0.0;             // max |F(t) - F(0)| / |F(0)| over the records
    double max_abs_drift = 0.0;         // same without the normalization
    double max_formula_mismatch = 0.0;  // E3 only: max |fd - formula| / max |formula|
    double max_abs_mismatch = 0.0;      // E3 only: max |fd - formula|
    double formula_scale = 0.0;         // max |formula| over the records
    std::vector<AuditSample> samples;
};

/// Drift and rate audit over the uniformly spaced record prefix of a
/// trajectory. Interior samples use the 4th-order centered stencil, the two
/// records at each end one-sided 3rd-order stencils. Needs >= 5 records.
AuditResult conservation_audit(const Trajectory& traj, Functional f);

/// Least-squares slope of log(err) against log(h).
/// Requires >= 3 samples, h strictly decreasing, all errors positive.
double order_estimate(const std::vector<std::pair<double, double>>& h_err);

}  // namespace geoflow
