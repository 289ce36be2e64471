#pragma once

#include <array>

#include "geoflow/covariant.hpp"

namespace geoflow {

/// One diagnostics row along a trajectory. I and H are cumulative sums over
/// derivative levels 0..4 (I_j = sum_{i<=j} int Ric(nabla^i u_x, nabla^i u_x) dx,
/// H_j the same with the metric in place of Ric).
struct EnergyReport {
    double t = 0.0;
    double E1 = 0.0, E2 = 0.0, E3 = 0.0;
    double F1 = 0.0, F2 = 0.0, F3 = 0.0, F4 = 0.0;
    double dE3_formula = 0.0;
    std::array<double, 5> I{};
    std::array<double, 5> H{};
    double residual = 0.0;
};

/// CSV column order for EnergyReport rows.
inline constexpr const char* kEnergyCsvHeader =
    "t,E1,E2,E3,F1,F2,F3,F4,dE3_formula,I0,I1,I2,I3,I4,H0,H1,H2,H3,H4,residual";

struct E3Breakdown {
    double E3 = 0.0, F1 = 0.0, F2 = 0.0, F3 = 0.0, F4 = 0.0;
};

/// Coefficients multiplying F1..F4 in E3. A2 and A3 scale with rho.
inline constexpr double kA1 = 6.0;
inline constexpr double kA4 = -4.0;
inline double coeff_A2(double rho) { return -20.0 * rho; }
inline double coeff_A3(double rho) { return -10.0 * rho; }

double energy_E1(const MapState& u, Differentiator& diff);
double energy_E2(const MapState& u, double rho, Differentiator& diff, bool dealias = true);
E3Breakdown energy_E3(const MapState& u, double rho, Differentiator& diff, bool dealias = true);

/// Closed-form time derivative of E3 along the flow (everything that survives
/// the A-coefficient cancellations). Involves only u_x and nabla_x u_x.
double dE3_dt_formula(const MapState& u, double rho, Differentiator& diff, bool dealias = true);

/// Relative residuals of the three coefficient groups that must cancel when
/// dE3/dt is assembled from the raw dF1..dF4 expressions: (20 rho A1 + 6 A2),
/// (10 rho A1 + 6 A3), (4 A1 + 6 A4), each weighted by its shared integral.
struct CancellationAudit {
    std::array<double, 3> group_value{};  // coefficient-sum times integral
    std::array<double, 3> group_scale{};  // sum of |individual contributions|
    std::array<double, 3> relative{};     // |value| / scale (0 when scale is 0)
    double max_relative = 0.0;
};
CancellationAudit dE3_cancellation_audit(const MapState& u, double rho, Differentiator& diff);

/// Cumulative Ricci-weighted Sobolev sums I_0..I_m (m <= 4).
std::array<double, 5> ricci_sobolev_I(const MapState& u, int m, Differentiator& diff);
/// Cumulative ||u_x||^2_{H^j} for j = 0..m (m <= 4).
std::array<double, 5> sobolev_H(const MapState& u, int m, Differentiator& diff);

/// Gagliardo-Nirenberg style ratios (diagnostics; the constants are unknown):
///   ratio_inf = ||u_x||_inf / ((||nabla u_x||^2 + ||u_x||^2)^{1/4} ||u_x||^{1/2})
///   ratio_l3  = ||nabla u_x||^3_{L3} / ((||nabla^2 u_x||^2 + ||nabla u_x||^2)^{1/4} ||nabla u_x||^{5/2})
struct GNDiagnostic {
    double ratio_inf = 0.0;
    double ratio_l3 = 0.0;
};
GNDiagnostic gn_diagnostic(const MapState& u, Differentiator& diff);

/// Full diagnostics row; uses one shared covariant stack of depth 4.
EnergyReport evaluate_energies(const MapState& u, double rho, double t, Differentiator& diff,
                               bool dealias = true);

}  // namespace geoflow
