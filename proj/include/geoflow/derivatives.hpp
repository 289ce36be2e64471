#pragma once

#include <complex>
#include <memory>
#include <string>

#include "geoflow/grid.hpp"

namespace geoflow {

enum class Scheme { Spectral, FD2, FD4 };

Scheme scheme_from_string(const std::string& s);
std::string to_string(Scheme s);

/// Fourier differentiation on periodic rows of M samples. Owns FFTW plans and
/// scratch for one grid size (and one batch width for the field-level paths);
/// plans use FFTW_ESTIMATE so results are reproducible run to run. Multiplier
/// tables for (ik)^order are cached per order. Not thread-safe; one engine per
/// thread of use.
class SpectralEngine {
public:
    explicit SpectralEngine(int points, int field_coords = 1);
    ~SpectralEngine();
    SpectralEngine(const SpectralEngine&) = delete;
    SpectralEngine& operator=(const SpectralEngine&) = delete;

    int points() const { return M_; }
    int modes() const { return M_ / 2 + 1; }

    /// d^order/dx^order by ik-multiplication. The Nyquist mode is zeroed for
    /// odd orders (its odd-derivative coefficient is not representable).
    void derivative_row(const double* in, double* out, int order);

    /// 2/3-rule low-pass: zero all modes with |k| > floor(M/3).
    void lowpass_two_thirds_row(const double* in, double* out);

    /// Batched versions over all coordinate rows of a field (field.coords must
    /// equal the engine's field_coords).
    void derivative_field(const Field& in, Field& out, int order);
    void lowpass_two_thirds_field(const Field& in, Field& out);

    /// Forward real transform, normalized so coefficients are u_hat_k = (1/M) sum u_j e^{-ikx_j}.
    void forward(const double* in, std::complex<double>* out);
    /// Inverse of forward().
    void inverse(const std::complex<double>* in, double* out);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int M_;
};

/// Periodic centered finite-difference derivative of one row.
/// order: derivative order 1..4; acc: 2 or 4 (stencil accuracy).
void fd_derivative_row(const double* in, double* out, int points, double dx, int order, int acc);

/// Discrete d^order/dx^order applied to every coordinate row of a field.
/// Spectral differentiation is exact for band-limited data (|k| <= M/2 - 1).
void ambient_deriv(const Field& in, Field& out, double dx, int order, Scheme scheme,
                   SpectralEngine* engine);

/// Convenience wrapper that manages an engine cache internally (serialized;
/// fine for tests and one-off evaluations, not for integration hot loops).
Field ambient_deriv(const Field& in, double dx, int order, Scheme scheme);

/// Trapezoidal quadrature on the uniform periodic grid (spectrally accurate
/// for smooth periodic integrands): dx * sum of samples.
inline double quadrature(const double* samples, int points, double dx) {
    double s = 0.0;
    for (int j = 0; j < points; ++j) s += samples[j];
    return s * dx;
}

}  // namespace geoflow
