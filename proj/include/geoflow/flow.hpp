#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geoflow/functionals.hpp"

namespace geoflow {

struct FlowConfig {
    double rho = 1.0;       // coefficient on the Ricci transport term
    double epsilon = 0.0;   // 0 selects the dispersive flow, >0 the regularized one
    double t_end = 1.0;
    double dt = 0.0;        // <= 0 selects the CFL policy
    double safety = 0.5;
    bool reproject_every_stage = true;
    Scheme scheme = Scheme::Spectral;
    bool dealias = true;
    int record_stride = 0;  // 0: pick automatically
};

/// Stability-bounded step: dt = safety * min(2.8 / k_max^3, 2.78 / (eps k_max^4)),
/// k_max = M/2. The constants are the RK4 stability-interval radii along the
/// imaginary and negative-real axes; the second bound is dropped when eps = 0.
double cfl_dt(int grid_points, double epsilon, double safety);

enum class RunStatus { Completed, BlowUpNonFinite, BlowUpLeftTube };
std::string to_string(RunStatus s);

struct TrajectoryRecord {
    double t = 0.0;
    EnergyReport energy;
};

struct Trajectory {
    FlowConfig config;
    RunStatus status = RunStatus::Completed;
    double dt = 0.0;           // uniform step used
    double record_dt = 0.0;    // spacing of the uniform record prefix
    int uniform_records = 0;   // records[0..uniform_records) are uniformly spaced
    double final_time = 0.0;   // last time reached (== t_end unless a blow-up aborted)
    std::vector<TrajectoryRecord> records;
    std::optional<MapState> final_state;
};

/// Explicit RK4 march of one state under the flow (or its regularization),
/// with stage-wise retraction onto the target. The workspace (spectral plans,
/// stage fields) is allocated once and reused every step.
class FlowIntegrator {
public:
    FlowIntegrator(const MapState& u0, const FlowConfig& cfg);

    const MapState& state() const { return u_; }
    double time() const { return t_; }
    double dt() const { return dt_; }
    RunStatus status() const { return status_; }
    Differentiator& differentiator() { return diff_; }

    /// Right-hand side at u: nabla_x^2 u_x + rho Ric(u_x,u_x) u_x, minus
    /// eps nabla_x^3 u_x when regularized. Result is tangent at every node.
    void eval_rhs(const MapState& u, TangentField& out);

    /// One RK4 step of size h; returns false (and sets status) on blow-up.
    bool step(double h);

    /// March to cfg.t_end, recording diagnostics every record stride and a
    /// final (possibly off-stride) record at t_end.
    Trajectory run();

private:
    bool stage_state(const MapState& base, double h, const TangentField& k, MapState& out);

    FlowConfig cfg_;
    MapState u_;
    double t_ = 0.0;
    double dt_ = 0.0;
    int steps_taken_ = 0;
    RunStatus status_ = RunStatus::Completed;

    Differentiator diff_;
    std::vector<TangentField> stack_;
    Field ux_filtered_;
    TangentField k1_, k2_, k3_, k4_;
    MapState stage_;
    Field rows_;  // scratch rows for the node-wise kernels
};

// Spec-surface conveniences (tests and one-off evaluations).
TangentField rhs_flow(const MapState& u, double rho, Scheme scheme = Scheme::Spectral,
                      bool dealias = true);
TangentField rhs_regularized(const MapState& u, double rho, double epsilon,
                             Scheme scheme = Scheme::Spectral, bool dealias = true);
/// One RK4 step; throws std::domain_error when the step leaves the
/// retraction tube or produces non-finite values.
MapState step_rk4(const MapState& u, double dt, const FlowConfig& cfg);

Trajectory integrate(const MapState& u0, const FlowConfig& cfg);

/// Discrete W^{1,2} distance of two states as ambient-coordinate functions:
/// sqrt(||u-v||^2_{L2} + ||D_x(u-v)||^2_{L2}).
double diff_w12(const MapState& u, const MapState& v, Scheme scheme = Scheme::Spectral);
/// Plain L2 distance of the ambient coordinates.
double diff_l2(const MapState& u, const MapState& v);

}  // namespace geoflow
