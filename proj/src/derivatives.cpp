#include "geoflow/derivatives.hpp"

#include <fftw3.h>

#include <array>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace geoflow {

Scheme scheme_from_string(const std::string& s) {
    if (s == "spectral") return Scheme::Spectral;
    if (s == "fd2") return Scheme::FD2;
    if (s == "fd4") return Scheme::FD4;
    throw std::invalid_argument("unknown scheme: " + s);
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::Spectral: return "spectral";
        case Scheme::FD2: return "fd2";
        case Scheme::FD4: return "fd4";
    }
    return "?";
}

struct SpectralEngine::Impl {
    int M = 0;
    int H = 0;  // modes
    int coords = 1;
    fftw_plan fwd = nullptr, bwd = nullptr;          // single row
    fftw_plan fwd_many = nullptr, bwd_many = nullptr;
    double* rbuf = nullptr;
    fftw_complex* cbuf = nullptr;
    // multiplier tables for (ik)^order / M, orders 1..4; interleaved re, im
    std::array<std::vector<double>, 5> mult;
    std::vector<double> lowpass;  // 2/3 mask / M

    const std::vector<double>& mult_for(int order) {
        if (order < 1 || order > 4) throw std::invalid_argument("derivative order must be 1..4");
        auto& t = mult[order];
        if (t.empty()) {
            t.resize(2 * H);
            const double ninv = 1.0 / M;
            for (int k = 0; k < H; ++k) {
                double kp = ninv;
                for (int p = 0; p < order; ++p) kp *= k;
                double re = 0.0, im = 0.0;
                switch (order & 3) {
                    case 0: re = kp; break;
                    case 1: im = kp; break;
                    case 2: re = -kp; break;
                    default: im = -kp; break;
                }
                if (k == M / 2 && M % 2 == 0 && (order & 1)) re = im = 0.0;
                t[2 * k] = re;
                t[2 * k + 1] = im;
            }
        }
        return t;
    }

    void apply_mult(const std::vector<double>& t, int rows) {
        for (int c = 0; c < rows; ++c) {
            fftw_complex* row = cbuf + static_cast<size_t>(c) * H;
            for (int k = 0; k < H; ++k) {
                const double re = t[2 * k], im = t[2 * k + 1];
                const double a = row[k][0], b = row[k][1];
                row[k][0] = a * re - b * im;
                row[k][1] = a * im + b * re;
            }
        }
    }

    void apply_real(const std::vector<double>& t, int rows) {
        for (int c = 0; c < rows; ++c) {
            fftw_complex* row = cbuf + static_cast<size_t>(c) * H;
            for (int k = 0; k < H; ++k) {
                row[k][0] *= t[k];
                row[k][1] *= t[k];
            }
        }
    }
};

SpectralEngine::SpectralEngine(int points, int field_coords) : impl_(new Impl), M_(points) {
    if (points < 8) throw std::invalid_argument("SpectralEngine: need at least 8 points");
    if (field_coords < 1) throw std::invalid_argument("SpectralEngine: field_coords must be >= 1");
    Impl& im = *impl_;
    im.M = points;
    im.H = points / 2 + 1;
    im.coords = field_coords;
    im.rbuf = fftw_alloc_real(static_cast<size_t>(points) * field_coords);
    im.cbuf = fftw_alloc_complex(static_cast<size_t>(im.H) * field_coords);
    im.fwd = fftw_plan_dft_r2c_1d(points, im.rbuf, im.cbuf, FFTW_ESTIMATE);
    im.bwd = fftw_plan_dft_c2r_1d(points, im.cbuf, im.rbuf, FFTW_ESTIMATE);
    if (field_coords > 1) {
        int n[1] = {points};
        im.fwd_many = fftw_plan_many_dft_r2c(1, n, field_coords, im.rbuf, nullptr, 1, points,
                                             im.cbuf, nullptr, 1, im.H, FFTW_ESTIMATE);
        im.bwd_many = fftw_plan_many_dft_c2r(1, n, field_coords, im.cbuf, nullptr, 1, im.H,
                                             im.rbuf, nullptr, 1, points, FFTW_ESTIMATE);
    }
    im.lowpass.resize(im.H);
    const int keep = points / 3;
    for (int k = 0; k < im.H; ++k) im.lowpass[k] = k <= keep ? 1.0 / points : 0.0;
}

SpectralEngine::~SpectralEngine() {
    if (!impl_) return;
    fftw_destroy_plan(impl_->fwd);
    fftw_destroy_plan(impl_->bwd);
    if (impl_->fwd_many) fftw_destroy_plan(impl_->fwd_many);
    if (impl_->bwd_many) fftw_destroy_plan(impl_->bwd_many);
    fftw_free(impl_->rbuf);
    fftw_free(impl_->cbuf);
}

void SpectralEngine::derivative_row(const double* in, double* out, int order) {
    Impl& im = *impl_;
    const auto& t = im.mult_for(order);
    std::memcpy(im.rbuf, in, sizeof(double) * M_);
    fftw_execute(im.fwd);
    im.apply_mult(t, 1);
    fftw_execute(im.bwd);
    std::memcpy(out, im.rbuf, sizeof(double) * M_);
}

void SpectralEngine::lowpass_two_thirds_row(const double* in, double* out) {
    Impl& im = *impl_;
    std::memcpy(im.rbuf, in, sizeof(double) * M_);
    fftw_execute(im.fwd);
    im.apply_real(im.lowpass, 1);
    fftw_execute(im.bwd);
    std::memcpy(out, im.rbuf, sizeof(double) * M_);
}

void SpectralEngine::derivative_field(const Field& in, Field& out, int order) {
    Impl& im = *impl_;
    if (in.points != M_) throw std::invalid_argument("SpectralEngine: field size mismatch");
    if (!out.same_shape(in)) out = Field(in.coords, in.points);
    if (in.coords != im.coords || im.fwd_many == nullptr) {
        for (int c = 0; c < in.coords; ++c) derivative_row(in.row(c), out.row(c), order);
        return;
    }
    const auto& t = im.mult_for(order);
    std::memcpy(im.rbuf, in.data.data(), sizeof(double) * in.data.size());
    fftw_execute(im.fwd_many);
    im.apply_mult(t, in.coords);
    fftw_execute(im.bwd_many);
    std::memcpy(out.data.data(), im.rbuf, sizeof(double) * out.data.size());
}

void SpectralEngine::lowpass_two_thirds_field(const Field& in, Field& out) {
    Impl& im = *impl_;
    if (in.points != M_) throw std::invalid_argument("SpectralEngine: field size mismatch");
    if (!out.same_shape(in)) out = Field(in.coords, in.points);
    if (in.coords != im.coords || im.fwd_many == nullptr) {
        for (int c = 0; c < in.coords; ++c) lowpass_two_thirds_row(in.row(c), out.row(c));
        return;
    }
    std::memcpy(im.rbuf, in.data.data(), sizeof(double) * in.data.size());
    fftw_execute(im.fwd_many);
    im.apply_real(im.lowpass, in.coords);
    fftw_execute(im.bwd_many);
    std::memcpy(out.data.data(), im.rbuf, sizeof(double) * out.data.size());
}

void SpectralEngine::forward(const double* in, std::complex<double>* out) {
    Impl& im = *impl_;
    std::memcpy(im.rbuf, in, sizeof(double) * M_);
    fftw_execute(im.fwd);
    const double ninv = 1.0 / M_;
    for (int k = 0; k < im.H; ++k)
        out[k] = std::complex<double>(im.cbuf[k][0] * ninv, im.cbuf[k][1] * ninv);
}

void SpectralEngine::inverse(const std::complex<double>* in, double* out) {
    Impl& im = *impl_;
    for (int k = 0; k < im.H; ++k) {
        im.cbuf[k][0] = in[k].real();
        im.cbuf[k][1] = in[k].imag();
    }
    fftw_execute(im.bwd);
    std::memcpy(out, im.rbuf, sizeof(double) * M_);
}

namespace {

// Centered periodic stencils, offsets -width..width.
const double* fd_coeffs(int order, int acc, int& width) {
    // clang-format off
    static const double d1a2[] = {-0.5, 0.0, 0.5};
    static const double d2a2[] = {1.0, -2.0, 1.0};
    static const double d3a2[] = {-0.5, 1.0, 0.0, -1.0, 0.5};
    static const double d4a2[] = {1.0, -4.0, 6.0, -4.0, 1.0};
    static const double d1a4[] = {1.0/12, -2.0/3, 0.0, 2.0/3, -1.0/12};
    static const double d2a4[] = {-1.0/12, 4.0/3, -5.0/2, 4.0/3, -1.0/12};
    static const double d3a4[] = {1.0/8, -1.0, 13.0/8, 0.0, -13.0/8, 1.0, -1.0/8};
    static const double d4a4[] = {-1.0/6, 2.0, -13.0/2, 28.0/3, -13.0/2, 2.0, -1.0/6};
    // clang-format on
    if (acc == 2) {
        switch (order) {
            case 1: width = 1; return d1a2;
            case 2: width = 1; return d2a2;
            case 3: width = 2; return d3a2;
            case 4: width = 2; return d4a2;
        }
    } else if (acc == 4) {
        switch (order) {
            case 1: width = 2; return d1a4;
            case 2: width = 2; return d2a4;
            case 3: width = 3; return d3a4;
            case 4: width = 3; return d4a4;
        }
    }
    throw std::invalid_argument("fd_derivative_row: order must be 1..4 with FD schemes");
}

}  // namespace

void fd_derivative_row(const double* in, double* out, int points, double dx, int order, int acc) {
    int w = 0;
    const double* c = fd_coeffs(order, acc, w);
    if (points < 2 * order + 2)
        throw std::invalid_argument("fd_derivative_row: grid too small for stencil");
    double scale = 1.0;
    for (int p = 0; p < order; ++p) scale /= dx;
    for (int j = 0; j < points; ++j) {
        double s = 0.0;
        for (int o = -w; o <= w; ++o) {
            int idx = j + o;
            if (idx < 0) idx += points;
            if (idx >= points) idx -= points;
            s += c[o + w] * in[idx];
        }
        out[j] = s * scale;
    }
}

void ambient_deriv(const Field& in, Field& out, double dx, int order, Scheme scheme,
                   SpectralEngine* engine) {
    if (!out.same_shape(in)) out = Field(in.coords, in.points);
    switch (scheme) {
        case Scheme::Spectral:
            engine->derivative_field(in, out, order);
            return;
        case Scheme::FD2:
            for (int c = 0; c < in.coords; ++c)
                fd_derivative_row(in.row(c), out.row(c), in.points, dx, order, 2);
            return;
        case Scheme::FD4:
            for (int c = 0; c < in.coords; ++c)
                fd_derivative_row(in.row(c), out.row(c), in.points, dx, order, 4);
            return;
    }
}

namespace {
std::mutex g_engine_mutex;
std::map<int, std::unique_ptr<SpectralEngine>>& engine_cache() {
    static std::map<int, std::unique_ptr<SpectralEngine>> cache;
    return cache;
}
}  // namespace

Field ambient_deriv(const Field& in, double dx, int order, Scheme scheme) {
    Field out(in.coords, in.points);
    if (scheme == Scheme::Spectral) {
        std::lock_guard<std::mutex> lock(g_engine_mutex);
        auto& slot = engine_cache()[in.points];
        if (!slot) slot = std::make_unique<SpectralEngine>(in.points);
        ambient_deriv(in, out, dx, order, scheme, slot.get());
    } else {
        ambient_deriv(in, out, dx, order, scheme, nullptr);
    }
    return out;
}

}  // namespace geoflow
