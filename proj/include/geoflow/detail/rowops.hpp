#pragma once

// Row-oriented kernels for the integration hot path: everything loops over
// whole coordinate rows so the compiler can vectorize across grid nodes.

#include "geoflow/grid.hpp"

namespace geoflow::detail {

/// out[j] = sum_c sig_c * a_c[j] * b_c[j]
inline void signed_dot_rows(const SpaceForm& N, const Field& a, const Field& b, double* out) {
    const int M = a.points;
    const int m = a.coords;
    const double* a0 = a.row(0);
    const double* b0 = b.row(0);
    for (int j = 0; j < M; ++j) out[j] = a0[j] * b0[j];
    for (int c = 1; c < m; ++c) {
        const double s = N.signature(c);
        const double* ac = a.row(c);
        const double* bc = b.row(c);
        if (s > 0)
            for (int j = 0; j < M; ++j) out[j] += ac[j] * bc[j];
        else
            for (int j = 0; j < M; ++j) out[j] -= ac[j] * bc[j];
    }
}

/// v <- v - (<v,p>/<p,p>) p per node, with scratch rows vp, pp of length M.
inline void project_field(const SpaceForm& N, const Field& base, Field& v, double* vp,
                          double* pp) {
    if (N.kind() == TargetKind::Flat) return;
    const int M = v.points;
    signed_dot_rows(N, v, base, vp);
    signed_dot_rows(N, base, base, pp);
    for (int j = 0; j < M; ++j) vp[j] /= pp[j];
    for (int c = 0; c < v.coords; ++c) {
        double* vc = v.row(c);
        const double* pc = base.row(c);
        for (int j = 0; j < M; ++j) vc[j] -= vp[j] * pc[j];
    }
}

/// Normalize every node back onto the target; false when a node leaves the
/// retraction tube. scratch holds one row.
inline bool retract_field(const SpaceForm& N, Field& f, double* scratch) {
    if (N.kind() == TargetKind::Flat) return true;
    const int M = f.points;
    signed_dot_rows(N, f, f, scratch);
    const double c = 1.0 / N.curvature();  // target <p,p>
    if (N.kind() == TargetKind::Sphere) {
        for (int j = 0; j < M; ++j)
            if (!(scratch[j] > 0.25 * c)) return false;
    } else {
        const double* last = f.row(f.coords - 1);
        for (int j = 0; j < M; ++j)
            if (!(scratch[j] < 0.25 * c) || !(last[j] > 0.0)) return false;
    }
    for (int j = 0; j < M; ++j) scratch[j] = std::sqrt(c / scratch[j]);
    for (int cc = 0; cc < f.coords; ++cc) {
        double* fc = f.row(cc);
        for (int j = 0; j < M; ++j) fc[j] *= scratch[j];
    }
    return true;
}

/// out = a + h * k, row-wise.
inline void axpy_field(const Field& a, double h, const Field& k, Field& out) {
    const size_t n = a.data.size();
    for (size_t i = 0; i < n; ++i) out.data[i] = a.data[i] + h * k.data[i];
}

}  // namespace geoflow::detail
