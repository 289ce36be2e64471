#include "geoflow/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace geoflow {

namespace {

// Shared per-state evaluation context: covariant stack plus (optionally)
// 2/3-filtered copies of the fields that enter cubic-or-higher products.
struct StackCtx {
    const MapState& u;
    std::vector<TangentField> stack;
    Field ux_f, d1_f;
    const Field* ux_cubic;  // field used inside >=3-factor products
    const Field* d1_cubic;

    StackCtx(const MapState& state, int depth, Differentiator& diff, bool dealias)
        : u(state) {
        diff.cov_stack(state, depth, stack);
        if (dealias && diff.scheme() == Scheme::Spectral) {
            diff.lowpass(stack[0].vectors, ux_f);
            ux_cubic = &ux_f;
            if (depth >= 1) {
                diff.lowpass(stack[1].vectors, d1_f);
                d1_cubic = &d1_f;
            } else {
                d1_cubic = nullptr;
            }
        } else {
            ux_cubic = &stack[0].vectors;
            d1_cubic = depth >= 1 ? &stack[1].vectors : nullptr;
        }
    }
};

}  // namespace

double energy_E1(const MapState& u, Differentiator& diff) {
    TangentField ux = diff.velocity(u);
    const SpaceForm& N = u.target;
    double s = 0.0;
    double v[8];
    for (int j = 0; j < u.grid.points; ++j) {
        ux.vectors.gather(j, v);
        s += N.ricci(v, v);
    }
    return s * u.grid.dx;
}

double energy_E2(const MapState& u, double rho, Differentiator& diff, bool dealias) {
    StackCtx ctx(u, 1, diff, dealias);
    const SpaceForm& N = u.target;
    double a = 0.0, b = 0.0;
    double d1[8], uxf[8];
    for (int j = 0; j < u.grid.points; ++j) {
        ctx.stack[1].vectors.gather(j, d1);
        ctx.ux_cubic->gather(j, uxf);
        a += N.ricci(d1, d1);
        const double r = N.ricci(uxf, uxf);
        b += r * r;
    }
    return (a - 0.5 * rho * b) * u.grid.dx;
}

E3Breakdown energy_E3(const MapState& u, double rho, Differentiator& diff, bool dealias) {
    StackCtx ctx(u, 2, diff, dealias);
    const SpaceForm& N = u.target;
    double f1 = 0.0, f2 = 0.0, f3 = 0.0, f4 = 0.0;
    double ux[8], d1[8], d2[8], r[8];
    for (int j = 0; j < u.grid.points; ++j) {
        ctx.stack[2].vectors.gather(j, d2);
        f1 += N.ricci(d2, d2);
        ctx.ux_cubic->gather(j, ux);
        ctx.d1_cubic->gather(j, d1);
        const double rdu = N.ricci(d1, ux);
        f2 += rdu * rdu;
        f3 += N.ricci(d1, d1) * N.ricci(ux, ux);
        N.curvature(d1, ux, ux, r);
        f4 += N.ricci(d1, r);
    }
    const double dx = u.grid.dx;
    E3Breakdown out;
    out.F1 = f1 * dx;
    out.F2 = f2 * dx;
    out.F3 = f3 * dx;
    out.F4 = f4 * dx;
    out.E3 = kA1 * out.F1 + coeff_A2(rho) * out.F2 + coeff_A3(rho) * out.F3 + kA4 * out.F4;
    return out;
}

double dE3_dt_formula(const MapState& u, double rho, Differentiator& diff, bool dealias) {
    StackCtx ctx(u, 1, diff, dealias);
    const SpaceForm& N = u.target;
    double t_cube = 0.0, t_mixed = 0.0, t_triple = 0.0, t_double_curv = 0.0;
    double ux[8], d1[8], ra[8], rb[8];
    for (int j = 0; j < u.grid.points; ++j) {
        ctx.ux_cubic->gather(j, ux);
        ctx.d1_cubic->gather(j, d1);
        const double rdu = N.ricci(d1, ux);
        t_cube += rdu * rdu * rdu;
        N.curvature(d1, ux, ux, ra);  // R(d1, ux) ux
        t_mixed += N.ricci(d1, ra) * rdu;
        t_triple += N.ricci(d1, d1) * rdu * N.ricci(ux, ux);
        N.curvature(d1, ux, d1, rb);  // R(d1, ux) d1
        t_double_curv += N.ricci(rb, ra);
    }
    const double dx = u.grid.dx;
    return -80.0 * rho * rho * t_cube * dx + 40.0 * rho * (rho - 1.0) * t_mixed * dx -
           100.0 * rho * rho * t_triple * dx + 8.0 * t_double_curv * dx;
}

CancellationAudit dE3_cancellation_audit(const MapState& u, double rho, Differentiator& diff) {
    std::vector<TangentField> stack = diff.cov_stack(u, 2);
    const SpaceForm& N = u.target;
    double g1 = 0.0, g2 = 0.0, g3 = 0.0;
    double ux[8], d1[8], d2[8], r[8];
    for (int j = 0; j < u.grid.points; ++j) {
        stack[0].vectors.gather(j, ux);
        stack[1].vectors.gather(j, d1);
        stack[2].vectors.gather(j, d2);
        g1 += N.ricci(d2, d1) * N.ricci(d2, ux);
        g2 += N.ricci(d2, d2) * N.ricci(d1, ux);
        N.curvature(d2, ux, d1, r);  // R(d2, ux) d1
        g3 += N.ricci(d2, r);
    }
    const double dx = u.grid.dx;
    g1 *= dx;
    g2 *= dx;
    g3 *= dx;

    // contributions per group: (from dF1, from dF2/dF3/dF4)
    const double A2 = coeff_A2(rho), A3 = coeff_A3(rho);
    const double parts[3][2] = {{kA1 * 20.0 * rho * g1, A2 * 6.0 * g1},
                                {kA1 * 10.0 * rho * g2, A3 * 6.0 * g2},
                                {kA1 * 4.0 * g3, kA4 * 6.0 * g3}};
    CancellationAudit audit;
    for (int i = 0; i < 3; ++i) {
        audit.group_value[i] = parts[i][0] + parts[i][1];
        audit.group_scale[i] = std::abs(parts[i][0]) + std::abs(parts[i][1]);
        audit.relative[i] =
            audit.group_scale[i] > 0.0 ? std::abs(audit.group_value[i]) / audit.group_scale[i] : 0.0;
        audit.max_relative = std::max(audit.max_relative, audit.relative[i]);
    }
    return audit;
}

std::array<double, 5> ricci_sobolev_I(const MapState& u, int m, Differentiator& diff) {
    if (m < 0 || m > 4) throw std::invalid_argument("ricci_sobolev_I: m must be in 0..4");
    std::vector<TangentField> stack = diff.cov_stack(u, m);
    const SpaceForm& N = u.target;
    std::array<double, 5> out{};
    double v[8];
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
        double s = 0.0;
        for (int j = 0; j < u.grid.points; ++j) {
            stack[i].vectors.gather(j, v);
            s += N.ricci(v, v);
        }
        acc += s * u.grid.dx;
        out[i] = acc;
    }
    return out;
}

std::array<double, 5> sobolev_H(const MapState& u, int m, Differentiator& diff) {
    if (m < 0 || m > 4) throw std::invalid_argument("sobolev_H: m must be in 0..4");
    std::vector<TangentField> stack = diff.cov_stack(u, m);
    const SpaceForm& N = u.target;
    std::array<double, 5> out{};
    double v[8];
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
        double s = 0.0;
        for (int j = 0; j < u.grid.points; ++j) {
            stack[i].vectors.gather(j, v);
            s += N.dot(v, v);
        }
        acc += s * u.grid.dx;
        out[i] = acc;
    }
    return out;
}

GNDiagnostic gn_diagnostic(const MapState& u, Differentiator& diff) {
    std::vector<TangentField> stack = diff.cov_stack(u, 2);
    const SpaceForm& N = u.target;
    const double dx = u.grid.dx;
    double v[8];
    double ux_inf = 0.0, ux_l2 = 0.0, d1_l2 = 0.0, d2_l2 = 0.0, d1_l3 = 0.0;
    for (int j = 0; j < u.grid.points; ++j) {
        stack[0].vectors.gather(j, v);
        const double a = N.dot(v, v);
        ux_inf = std::max(ux_inf, a);
        ux_l2 += a;
        stack[1].vectors.gather(j, v);
        const double b = N.dot(v, v);
        d1_l2 += b;
        d1_l3 += b * std::sqrt(b);
        stack[2].vectors.gather(j, v);
        d2_l2 += N.dot(v, v);
    }
    ux_inf = std::sqrt(ux_inf);
    ux_l2 *= dx;
    d1_l2 *= dx;
    d2_l2 *= dx;
    d1_l3 *= dx;
    if (ux_l2 <= 0.0) throw std::domain_error("gn_diagnostic: zero velocity field, ratio undefined");

    GNDiagnostic gn;
    gn.ratio_inf = ux_inf / (std::pow(d1_l2 + ux_l2, 0.25) * std::pow(ux_l2, 0.25));
    // a covariant derivative at the roundoff floor is a genuine zero
    gn.ratio_l3 = d1_l2 > 1e-20 * ux_l2
                      ? d1_l3 / (std::pow(d2_l2 + d1_l2, 0.25) * std::pow(d1_l2, 1.25))
                      : 0.0;
    return gn;
}

EnergyReport evaluate_energies(const MapState& u, double rho, double t, Differentiator& diff,
                               bool dealias) {
    StackCtx ctx(u, 4, diff, dealias);
    const SpaceForm& N = u.target;
    const double dx = u.grid.dx;

    EnergyReport rep;
    rep.t = t;

    double ux[8], d1[8], d2[8], r[8], rb[8], v[8];
    double e1 = 0.0, e2a = 0.0, e2b = 0.0;
    double f1 = 0.0, f2 = 0.0, f3 = 0.0, f4 = 0.0;
    double t_cube = 0.0, t_mixed = 0.0, t_triple = 0.0, t_dc = 0.0;
    for (int j = 0; j < u.grid.points; ++j) {
        ctx.stack[0].vectors.gather(j, v);
        e1 += N.ricci(v, v);
        ctx.stack[1].vectors.gather(j, v);
        e2a += N.ricci(v, v);
        ctx.stack[2].vectors.gather(j, d2);
        f1 += N.ricci(d2, d2);

        ctx.ux_cubic->gather(j, ux);
        ctx.d1_cubic->gather(j, d1);
        const double ruu = N.ricci(ux, ux);
        const double rdu = N.ricci(d1, ux);
        e2b += ruu * ruu;
        f2 += rdu * rdu;
        f3 += N.ricci(d1, d1) * ruu;
        N.curvature(d1, ux, ux, r);
        f4 += N.ricci(d1, r);
        t_cube += rdu * rdu * rdu;
        t_mixed += N.ricci(d1, r) * rdu;
        t_triple += N.ricci(d1, d1) * rdu * ruu;
        N.curvature(d1, ux, d1, rb);
        t_dc += N.ricci(rb, r);
    }
    rep.E1 = e1 * dx;
    rep.E2 = (e2a - 0.5 * rho * e2b) * dx;
    rep.F1 = f1 * dx;
    rep.F2 = f2 * dx;
    rep.F3 = f3 * dx;
    rep.F4 = f4 * dx;
    rep.E3 = kA1 * rep.F1 + coeff_A2(rho) * rep.F2 + coeff_A3(rho) * rep.F3 + kA4 * rep.F4;
    rep.dE3_formula = (-80.0 * rho * rho * t_cube + 40.0 * rho * (rho - 1.0) * t_mixed -
                       100.0 * rho * rho * t_triple + 8.0 * t_dc) *
                      dx;

    double accI = 0.0, accH = 0.0;
    for (int i = 0; i <= 4; ++i) {
        double si = 0.0, sh = 0.0;
        for (int j = 0; j < u.grid.points; ++j) {
            ctx.stack[i].vectors.gather(j, v);
            si += N.ricci(v, v);
            sh += N.dot(v, v);
        }
        accI += si * dx;
        accH += sh * dx;
        rep.I[i] = accI;
        rep.H[i] = accH;
    }
    rep.residual = u.max_residual();
    return rep;
}

}  // namespace geoflow
