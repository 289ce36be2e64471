#include "geoflow/space_form.hpp"

#include <cmath>
#include <stdexcept>

namespace geoflow {

std::string to_string(TargetKind k) {
    switch (k) {
        case TargetKind::Sphere: return "sphere";
        case TargetKind::Hyperbolic: return "hyperbolic";
        case TargetKind::Flat: return "flat";
    }
    return "?";
}

SpaceForm::SpaceForm(TargetKind kind, int n, int m, double kappa)
    : kind_(kind), n_(n), m_(m), kappa_(kappa), einstein_((n - 1) * kappa) {
    if (m > 8) throw std::invalid_argument("SpaceForm: ambient dimension capped at 8");
}

SpaceForm SpaceForm::sphere(int n, double curvature_scale) {
    if (n < 1) throw std::invalid_argument("sphere: intrinsic_dim must be >= 1");
    if (curvature_scale <= 0.0) throw std::invalid_argument("sphere: curvature_scale must be > 0");
    return SpaceForm(TargetKind::Sphere, n, n + 1, curvature_scale);
}

SpaceForm SpaceForm::hyperbolic(int n, double curvature_scale) {
    if (n < 1) throw std::invalid_argument("hyperbolic: intrinsic_dim must be >= 1");
    if (curvature_scale <= 0.0) throw std::invalid_argument("hyperbolic: curvature_scale must be > 0");
    return SpaceForm(TargetKind::Hyperbolic, n, n + 1, -curvature_scale);
}

SpaceForm SpaceForm::flat(int n) {
    if (n < 1) throw std::invalid_argument("flat: intrinsic_dim must be >= 1");
    return SpaceForm(TargetKind::Flat, n, n, 0.0);
}

bool SpaceForm::retract(const double* in, double* out) const {
    switch (kind_) {
        case TargetKind::Flat:
            for (int i = 0; i < m_; ++i) out[i] = in[i];
            return true;
        case TargetKind::Sphere: {
            const double r2 = 1.0 / kappa_;
            double q = dot(in, in);
            if (q <= 0.25 * r2) return false;
            const double s = std::sqrt(r2 / q);
            for (int i = 0; i < m_; ++i) out[i] = s * in[i];
            return true;
        }
        case TargetKind::Hyperbolic: {
            const double c = 1.0 / kappa_;  // negative
            double q = dot(in, in);
            if (q >= 0.25 * c || in[m_ - 1] <= 0.0) return false;
            const double s = std::sqrt(c / q);
            for (int i = 0; i < m_; ++i) out[i] = s * in[i];
            return true;
        }
    }
    return false;
}

double SpaceForm::tangency_residual(const double* p, const double* v) const {
    if (kind_ == TargetKind::Flat) return 0.0;
    double np = 0.0, nv = 0.0;
    for (int i = 0; i < m_; ++i) {
        np += p[i] * p[i];
        nv += v[i] * v[i];
    }
    const double scale = std::sqrt(np * nv);
    if (scale == 0.0) return 0.0;
    return std::abs(dot(p, v)) / scale;
}

void SpaceForm::require_dim(const Vec& v, const char* what) const {
    if (static_cast<int>(v.size()) != m_)
        throw std::invalid_argument(std::string(what) + ": ambient dimension mismatch");
}

void SpaceForm::require_on_manifold(const Vec& p, const char* what) const {
    require_dim(p, what);
    if (on_manifold_residual(p.data()) > 1e-8)
        throw std::invalid_argument(std::string(what) + ": point not on manifold");
}

void SpaceForm::require_tangent(const Vec& p, const Vec& v, const char* what) const {
    require_dim(v, what);
    if (tangency_residual(p.data(), v.data()) > kTangencyTol)
        throw std::invalid_argument(std::string(what) + ": vector not tangent at base point");
}

double SpaceForm::metric_at(const Vec& p, const Vec& X, const Vec& Y) const {
    require_dim(p, "metric_at");
    require_dim(X, "metric_at");
    require_dim(Y, "metric_at");
    return dot(X.data(), Y.data());
}

Vec SpaceForm::project_tangent(const Vec& p, const Vec& v) const {
    require_on_manifold(p, "project_tangent");
    require_dim(v, "project_tangent");
    Vec out(m_);
    project(p.data(), v.data(), out.data());
    return out;
}

Vec SpaceForm::retract_point(const Vec& p_off) const {
    require_dim(p_off, "retract");
    Vec out(m_);
    if (!retract(p_off.data(), out.data()))
        throw std::domain_error("retract: point outside retraction tube (degenerate state)");
    return out;
}

Vec SpaceForm::curvature_op(const Vec& p, const Vec& X, const Vec& Y, const Vec& Z) const {
    require_on_manifold(p, "curvature_op");
    require_tangent(p, X, "curvature_op");
    require_tangent(p, Y, "curvature_op");
    require_tangent(p, Z, "curvature_op");
    Vec out(m_);
    curvature(X.data(), Y.data(), Z.data(), out.data());
    return out;
}

double SpaceForm::ricci_form(const Vec& p, const Vec& X, const Vec& Y) const {
    require_on_manifold(p, "ricci_form");
    require_tangent(p, X, "ricci_form");
    require_tangent(p, Y, "ricci_form");
    return ricci(X.data(), Y.data());
}

RicciSymmetryReport SpaceForm::verify_ricci_symmetry(const Vec& p, const Vec& X, const Vec& Y,
                                                     const Vec& Z, const Vec& W, double tol) const {
    require_on_manifold(p, "verify_ricci_symmetry");
    for (const Vec* v : {&X, &Y, &Z, &W}) require_tangent(p, *v, "verify_ricci_symmetry");

    Vec t(m_);
    curvature(Z.data(), W.data(), Y.data(), t.data());
    const double a = ricci(X.data(), t.data());  // Ric(X, R(Z,W)Y)
    curvature(W.data(), Z.data(), Y.data(), t.data());
    const double b = ricci(X.data(), t.data());  // Ric(X, R(W,Z)Y)
    curvature(X.data(), Y.data(), W.data(), t.data());
    const double c = ricci(Z.data(), t.data());  // Ric(Z, R(X,Y)W)
    curvature(Y.data(), X.data(), X.data(), t.data());
    const double d = ricci(X.data(), t.data());  // Ric(X, R(Y,X)X)

    RicciSymmetryReport rep;
    const double e1 = std::abs(a + b);
    const double e2 = std::abs(a - c);
    const double e3 = std::abs(d);
    rep.pair_antisymmetric = e1 <= tol;
    rep.block_symmetric = e2 <= tol;
    rep.degenerate_zero = e3 <= tol;
    rep.max_error = std::max({e1, e2, e3});
    return rep;
}

}  // namespace geoflow
