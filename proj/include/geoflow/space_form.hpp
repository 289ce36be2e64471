#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace geoflow {

/// Ambient point or vector, one coordinate per ambient dimension.
using Vec = std::vector<double>;

enum class TargetKind { Sphere, Hyperbolic, Flat };

std::string to_string(TargetKind k);

struct RicciSymmetryReport {
    bool pair_antisymmetric = false;  // Ric(X,R(Z,W)Y) = -Ric(X,R(W,Z)Y)
    bool block_symmetric = false;     // Ric(X,R(Z,W)Y) =  Ric(Z,R(X,Y)W)
    bool degenerate_zero = false;     // Ric(X,R(Y,X)X) = 0
    double max_error = 0.0;

    bool all() const { return pair_antisymmetric && block_symmetric && degenerate_zero; }
};

/// A constant-curvature target manifold embedded in a (possibly indefinite)
/// ambient inner-product space: round sphere in Euclidean space, upper-sheet
/// hyperboloid in Minkowski space, or flat Euclidean space itself. Curvature
/// operator and Ricci form are closed-form; no Christoffel symbols anywhere.
///
/// Immutable after construction, freely shareable across threads.
class SpaceForm {
public:
    static constexpr double kOnManifoldTol = 1e-12;  // post-retraction residual
    static constexpr double kTangencyTol = 1e-10;    // inputs may carry discretization error

    static SpaceForm sphere(int intrinsic_dim, double curvature_scale = 1.0);
    static SpaceForm hyperbolic(int intrinsic_dim, double curvature_scale = 1.0);
    static SpaceForm flat(int intrinsic_dim);

    TargetKind kind() const { return kind_; }
    int intrinsic_dim() const { return n_; }
    int ambient_dim() const { return m_; }
    double curvature() const { return kappa_; }
    /// The k in Ric = k*h; equals (n-1)*kappa. Its magnitude is the definite
    /// Ricci bound lambda (positive lower bound for spheres with n >= 2,
    /// negative upper bound for hyperbolic targets).
    double einstein_constant() const { return einstein_; }
    double signature(int i) const { return (kind_ == TargetKind::Hyperbolic && i == m_ - 1) ? -1.0 : 1.0; }

    // ---- raw pointwise kernels (no validation; hot paths) ----

    /// Signature-weighted ambient inner product.
    double dot(const double* x, const double* y) const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i) s += x[i] * y[i];
        if (kind_ == TargetKind::Hyperbolic) s -= 2.0 * x[m_ - 1] * y[m_ - 1];
        return s;
    }

    /// Orthogonal projection onto the tangent space at p. Identity on flat targets.
    void project(const double* p, const double* v, double* out) const {
        if (kind_ == TargetKind::Flat) {
            for (int i = 0; i < m_; ++i) out[i] = v[i];
            return;
        }
        const double s = dot(v, p) / dot(p, p);
        for (int i = 0; i < m_; ++i) out[i] = v[i] - s * p[i];
    }

    /// R(X,Y)Z = kappa * (<Y,Z> X - <X,Z> Y); accumulates into out.
    void curvature(const double* X, const double* Y, const double* Z, double* out) const {
        const double a = kappa_ * dot(Y, Z);
        const double b = kappa_ * dot(X, Z);
        for (int i = 0; i < m_; ++i) out[i] = a * X[i] - b * Y[i];
    }

    /// Ric(X,Y) = (n-1) * kappa * <X,Y>.
    double ricci(const double* X, const double* Y) const { return einstein_ * dot(X, Y); }

    /// Nearest-point normalization back onto the target. Returns false when
    /// the input lies outside the retraction tube (sphere: |p| <= r/2;
    /// hyperboloid: <p,p> >= c/4 or lower sheet). out may alias in.
    bool retract(const double* in, double* out) const;

    /// |<p,p> - c| with c = 1/kappa; zero on flat targets.
    double on_manifold_residual(const double* p) const {
        if (kind_ == TargetKind::Flat) return 0.0;
        return std::abs(dot(p, p) - 1.0 / kappa_);
    }

    double tangency_residual(const double* p, const double* v) const;

    // ---- checked operations ----

    double metric_at(const Vec& p, const Vec& X, const Vec& Y) const;
    Vec project_tangent(const Vec& p, const Vec& v) const;
    Vec retract_point(const Vec& p_off) const;
    Vec curvature_op(const Vec& p, const Vec& X, const Vec& Y, const Vec& Z) const;
    double ricci_form(const Vec& p, const Vec& X, const Vec& Y) const;
    RicciSymmetryReport verify_ricci_symmetry(const Vec& p, const Vec& X, const Vec& Y,
                                              const Vec& Z, const Vec& W,
                                              double tol = 1e-12) const;

private:
    SpaceForm(TargetKind kind, int n, int m, double kappa);

    void require_dim(const Vec& v, const char* what) const;
    void require_on_manifold(const Vec& p, const char* what) const;
    void require_tangent(const Vec& p, const Vec& v, const char* what) const;

    TargetKind kind_;
    int n_;          // intrinsic dimension
    int m_;          // ambient dimension
    double kappa_;   // sectional curvature
    double einstein_;
};

}  // namespace geoflow
