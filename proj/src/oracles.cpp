#include "geoflow/oracles.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace geoflow {

std::string to_string(Functional f) {
    switch (f) {
        case Functional::E1: return "E1";
        case Functional::E2: return "E2";
        case Functional::E3: return "E3";
    }
    return "?";
}

MapState airy_exact(const MapState& u0, double t) {
    if (u0.target.kind() != TargetKind::Flat)
        throw std::invalid_argument("airy_exact: target must be flat");
    const int M = u0.grid.points;
    SpectralEngine eng(M);
    MapState out = u0;
    std::vector<std::complex<double>> spec(M / 2 + 1);
    for (int c = 0; c < u0.values.coords; ++c) {
        eng.forward(u0.values.row(c), spec.data());
        for (int k = 0; k < M / 2; ++k) {
            const double phase = -static_cast<double>(k) * k * k * t;
            spec[k] *= std::complex<double>(std::cos(phase), std::sin(phase));
        }
        eng.inverse(spec.data(), out.values.row(c));
    }
    return out;
}

namespace {

// Eigenvector of the smallest eigenvalue of a symmetric 3x3 matrix, by
// cyclic Jacobi sweeps. Good enough for picking a chart pole.
void smallest_eigvec3(const double A_in[3][3], double v[3]) {
    double A[3][3], V[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A[i][j] = A_in[i][j];
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = std::abs(A[0][1]) + std::abs(A[0][2]) + std::abs(A[1][2]);
        if (off < 1e-15) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(A[p][q]) < 1e-18) continue;
                const double theta = 0.5 * std::atan2(2.0 * A[p][q], A[q][q] - A[p][p]);
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < 3; ++k) {
                    const double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - s * akq;
                    A[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - s * aqk;
                    A[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = V[k][p], vkq = V[k][q];
                    V[k][p] = c * vkp - s * vkq;
                    V[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (A[i][i] < A[best][best]) best = i;
    for (int k = 0; k < 3; ++k) v[k] = V[k][best];
}

}  // namespace

TangentField chart_cov_deriv(const MapState& u, const TangentField& V, const Vec& pole) {
    const SpaceForm& N = u.target;
    if (N.kind() != TargetKind::Sphere || N.ambient_dim() != 3 ||
        std::abs(N.curvature() - 1.0) > 1e-14)
        throw std::invalid_argument("chart_cov_deriv: implemented for the unit 2-sphere");
    const int M = u.grid.points;

    // chart pole: the direction farthest from the loop, chosen among the
    // antipode of the centroid and the axes the loop varies least along
    // (the centroid of a near-great-circle loop is pure noise).
    double q[3];
    if (!pole.empty()) {
        const double n = std::sqrt(pole[0] * pole[0] + pole[1] * pole[1] + pole[2] * pole[2]);
        for (int c = 0; c < 3; ++c) q[c] = pole[c] / n;
    } else {
        double centroid[3] = {0, 0, 0};
        for (int j = 0; j < M; ++j)
            for (int c = 0; c < 3; ++c) centroid[c] += u.values.at(c, j);
        for (int c = 0; c < 3; ++c) centroid[c] /= M;
        double cov[3][3] = {};
        for (int j = 0; j < M; ++j)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    cov[a][b] +=
                        (u.values.at(a, j) - centroid[a]) * (u.values.at(b, j) - centroid[b]);
        double ev[3];
        smallest_eigvec3(cov, ev);
        const double cn = std::sqrt(centroid[0] * centroid[0] + centroid[1] * centroid[1] +
                                    centroid[2] * centroid[2]);
        std::vector<std::array<double, 3>> candidates{{ev[0], ev[1], ev[2]},
                                                      {-ev[0], -ev[1], -ev[2]}};
        if (cn > 1e-12)
            candidates.push_back({-centroid[0] / cn, -centroid[1] / cn, -centroid[2] / cn});
        double best = -1.0;
        for (const auto& cand : candidates) {
            double closest = 4.0;
            for (int j = 0; j < M; ++j) {
                const double d2 = 2.0 - 2.0 * (u.values.at(0, j) * cand[0] +
                                               u.values.at(1, j) * cand[1] +
                                               u.values.at(2, j) * cand[2]);
                closest = std::min(closest, d2);
            }
            if (closest > best) {
                best = closest;
                q[0] = cand[0];
                q[1] = cand[1];
                q[2] = cand[2];
            }
        }
    }

    // orthonormal frame {e1, e2} spanning q^perp
    double e1[3], e2[3];
    {
        const double ax = std::abs(q[0]), ay = std::abs(q[1]), az = std::abs(q[2]);
        double h[3] = {0, 0, 0};
        h[ax <= ay ? (ax <= az ? 0 : 2) : (ay <= az ? 1 : 2)] = 1.0;
        e1[0] = q[1] * h[2] - q[2] * h[1];
        e1[1] = q[2] * h[0] - q[0] * h[2];
        e1[2] = q[0] * h[1] - q[1] * h[0];
        const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
        for (int c = 0; c < 3; ++c) e1[c] /= n1;
        e2[0] = q[1] * e1[2] - q[2] * e1[1];
        e2[1] = q[2] * e1[0] - q[0] * e1[2];
        e2[2] = q[0] * e1[1] - q[1] * e1[0];
    }

    // chart coordinates y and pushed-forward components of V
    Field y(2, M), Vc(2, M);
    for (int j = 0; j < M; ++j) {
        double p[3], v[3];
        u.values.gather(j, p);
        V.vectors.gather(j, v);
        const double pq = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
        const double d = 1.0 - pq;
        if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 2.0 * pq + 1.0 < 0.04)
            throw std::domain_error("chart_cov_deriv: loop too close to the chart pole");
        const double vq = v[0] * q[0] + v[1] * q[1] + v[2] * q[2];
        for (int a = 0; a < 2; ++a) {
            const double* e = a == 0 ? e1 : e2;
            const double pe = p[0] * e[0] + p[1] * e[1] + p[2] * e[2];
            const double ve = v[0] * e[0] + v[1] * e[1] + v[2] * e[2];
            y.at(a, j) = pe / d;
            Vc.at(a, j) = ve / d + pe * vq / (d * d);
        }
    }

    Field dy = ambient_deriv(y, u.grid.dx, 1, Scheme::Spectral);
    Field dV = ambient_deriv(Vc, u.grid.dx, 1, Scheme::Spectral);

    // conformal metric g = 4/(1+|y|^2)^2 delta: Gamma^a_{bc} = d_c phi delta_ab
    // + d_b phi delta_ac - d_a phi delta_bc with d_a phi = -2 y_a / (1+|y|^2)
    TangentField out(u.grid, 3);
    for (int j = 0; j < M; ++j) {
        const double y1 = y.at(0, j), y2 = y.at(1, j);
        const double s = 1.0 + y1 * y1 + y2 * y2;
        const double dphi[2] = {-2.0 * y1 / s, -2.0 * y2 / s};
        double nab[2];
        for (int a = 0; a < 2; ++a) {
            double acc = dV.at(a, j);
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) {
                    double gamma = 0.0;
                    if (a == b) gamma += dphi[c];
                    if (a == c) gamma += dphi[b];
                    if (b == c) gamma -= dphi[a];
                    acc += gamma * dy.at(b, j) * Vc.at(c, j);
                }
            nab[a] = acc;
        }
        // push back with the inverse-chart Jacobian columns dp/dy_a
        double w[3] = {0, 0, 0};
        const double yy[2] = {y1, y2};
        double p_frame[3] = {2.0 * y1 / s, 2.0 * y2 / s, (y1 * y1 + y2 * y2 - 1.0) / s};
        for (int a = 0; a < 2; ++a) {
            double col[3];
            col[0] = (a == 0 ? 2.0 / s : 0.0) - (2.0 * yy[a] / s) * p_frame[0];
            col[1] = (a == 1 ? 2.0 / s : 0.0) - (2.0 * yy[a] / s) * p_frame[1];
            col[2] = 2.0 * yy[a] / s - (2.0 * yy[a] / s) * p_frame[2];
            for (int c = 0; c < 3; ++c) w[c] += nab[a] * col[c];
        }
        double amb[3];
        for (int c = 0; c < 3; ++c) amb[c] = w[0] * e1[c] + w[1] * e2[c] + w[2] * q[c];
        out.vectors.scatter(j, amb);
    }
    return out;
}

AuditResult conservation_audit(const Trajectory& traj, Functional f) {
    const int n = traj.uniform_records;
    if (n < 5) throw std::invalid_argument("conservation_audit: need at least 5 uniform records");
    const double h = traj.record_dt;

    std::vector<double> val(n), formula(n, 0.0), ts(n);
    for (int i = 0; i < n; ++i) {
        const EnergyReport& r = traj.records[i].energy;
        ts[i] = traj.records[i].t;
        switch (f) {
            case Functional::E1: val[i] = r.E1; break;
            case Functional::E2: val[i] = r.E2; break;
            case Functional::E3:
                val[i] = r.E3;
                formula[i] = r.dE3_formula;
                break;
        }
    }

    AuditResult out;
    out.functional = f;
    const double scale = std::abs(val[0]);
    for (int i = 0; i < n; ++i) {
        out.max_abs_drift = std::max(out.max_abs_drift, std::abs(val[i] - val[0]));
        out.max_drift = std::max(out.max_drift, scale > 0.0 ? std::abs(val[i] - val[0]) / scale
                                                            : std::abs(val[i] - val[0]));
    }

    auto fd_at = [&](int i) {
        if (i >= 2 && i <= n - 3)
            return (-val[i + 2] + 8.0 * val[i + 1] - 8.0 * val[i - 1] + val[i - 2]) / (12.0 * h);
        if (i <= 1)
            return (-11.0 * val[i] + 18.0 * val[i + 1] - 9.0 * val[i + 2] + 2.0 * val[i + 3]) /
                   (6.0 * h);
        return (11.0 * val[i] - 18.0 * val[i - 1] + 9.0 * val[i - 2] - 2.0 * val[i - 3]) / (6.0 * h);
    };

    out.samples.resize(n);
    double formula_scale = 0.0;
    for (int i = 0; i < n; ++i) {
        out.samples[i] = {ts[i], fd_at(i), formula[i]};
        formula_scale = std::max(formula_scale, std::abs(formula[i]));
    }
    out.formula_scale = formula_scale;
    if (f == Functional::E3) {
        for (int i = 0; i < n; ++i)
            out.max_abs_mismatch =
                std::max(out.max_abs_mismatch, std::abs(out.samples[i].fd - formula[i]));
        if (formula_scale > 0.0) out.max_formula_mismatch = out.max_abs_mismatch / formula_scale;
    }
    return out;
}

double order_estimate(const std::vector<std::pair<double, double>>& h_err) {
    if (h_err.size() < 3) throw std::invalid_argument("order_estimate: need at least 3 samples");
    for (size_t i = 0; i < h_err.size(); ++i) {
        if (h_err[i].second <= 0.0)
            throw std::invalid_argument("order_estimate: errors must be positive");
        if (i > 0 && h_err[i].first >= h_err[i - 1].first)
            throw std::invalid_argument("order_estimate: h must be strictly decreasing");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(h_err.size());
    for (const auto& [h, e] : h_err) {
        const double x = std::log(h), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace geoflow
