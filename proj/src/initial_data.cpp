#include "geoflow/initial_data.hpp"

#include <cmath>
#include <stdexcept>

namespace geoflow {

double seeded_unit(uint64_t seed, uint64_t counter) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

InitialFamily family_from_string(const std::string& s) {
    if (s == "great_circle") return InitialFamily::GreatCircle;
    if (s == "perturbed_circle") return InitialFamily::PerturbedCircle;
    if (s == "random_band_limited") return InitialFamily::RandomBandLimited;
    if (s == "flat_fourier") return InitialFamily::FlatFourier;
    throw std::invalid_argument("unknown initial data family: " + s);
}

std::string to_string(InitialFamily f) {
    switch (f) {
        case InitialFamily::GreatCircle: return "great_circle";
        case InitialFamily::PerturbedCircle: return "perturbed_circle";
        case InitialFamily::RandomBandLimited: return "random_band_limited";
        case InitialFamily::FlatFourier: return "flat_fourier";
    }
    return "?";
}

namespace {

// Base loop plus an orthonormal tangent frame along it, in ambient coords.
struct BaseLoop {
    Field points;              // m x M
    std::vector<Field> frame;  // tangent directions along the loop
};

BaseLoop base_loop(const SpaceForm& N, const LoopGrid& g, double circle_radius, int winding) {
    const int M = g.points;
    const int m = N.ambient_dim();
    BaseLoop out;
    out.points = Field(m, M);

    if (N.kind() == TargetKind::Sphere) {
        const double r = 1.0 / std::sqrt(N.curvature());
        for (int j = 0; j < M; ++j) {
            const double x = g.node(j);
            out.points.at(0, j) = r * std::cos(winding * x);
            out.points.at(1, j) = r * std::sin(winding * x);
        }
        // unit tangent along the circle, then the constant normals of its plane
        Field t(m, M);
        for (int j = 0; j < M; ++j) {
            const double x = g.node(j);
            t.at(0, j) = -std::sin(winding * x);
            t.at(1, j) = std::cos(winding * x);
        }
        out.frame.push_back(std::move(t));
        for (int c = 2; c < m; ++c) {
            Field e(m, M);
            for (int j = 0; j < M; ++j) e.at(c, j) = 1.0;
            out.frame.push_back(std::move(e));
        }
    } else if (N.kind() == TargetKind::Hyperbolic) {
        if (m != 3)
            throw std::invalid_argument("hyperbolic base loop: implemented for H^2 (ambient dim 3)");
        const double scale = 1.0 / std::sqrt(-N.curvature());
        const double r = circle_radius;
        const double z0 = std::sqrt(1.0 + r * r);
        for (int j = 0; j < M; ++j) {
            const double x = g.node(j);
            out.points.at(0, j) = scale * r * std::cos(x);
            out.points.at(1, j) = scale * r * std::sin(x);
            out.points.at(2, j) = scale * z0;
        }
        Field t1(m, M), t2(m, M);
        for (int j = 0; j < M; ++j) {
            const double x = g.node(j);
            t1.at(0, j) = -std::sin(x);
            t1.at(1, j) = std::cos(x);
            // <t2,t2>_L = z0^2 - r^2 = 1 and <t2, base>_L = 0
            t2.at(0, j) = z0 * std::cos(x);
            t2.at(1, j) = z0 * std::sin(x);
            t2.at(2, j) = r;
        }
        out.frame.push_back(std::move(t1));
        out.frame.push_back(std::move(t2));
    } else {
        // flat: zero base loop, coordinate axes as the frame
        for (int c = 0; c < m; ++c) {
            Field e(m, M);
            for (int j = 0; j < M; ++j) e.at(c, j) = 1.0;
            out.frame.push_back(std::move(e));
        }
    }
    return out;
}

void add_seeded_modes(BaseLoop& base, const LoopGrid& g, int K, double coeff_scale, uint64_t seed,
                      bool harmonic_decay) {
    const int M = g.points;
    uint64_t counter = 0;
    for (int k = 1; k <= K; ++k) {
        const double s = harmonic_decay ? coeff_scale / k : coeff_scale;
        for (auto& dir : base.frame) {
            const double c1 = s * seeded_unit(seed, counter++);
            const double c2 = s * seeded_unit(seed, counter++);
            for (int j = 0; j < M; ++j) {
                const double x = g.node(j);
                const double bump = c1 * std::cos(k * x) + c2 * std::sin(k * x);
                for (int c = 0; c < base.points.coords; ++c)
                    base.points.at(c, j) += bump * dir.at(c, j);
            }
        }
    }
}

}  // namespace

MapState build_initial(const InitialDataSpec& spec, const LoopGrid& grid, const SpaceForm& target) {
    const bool curved = target.kind() != TargetKind::Flat;
    MapState u(grid, target);

    switch (spec.family) {
        case InitialFamily::GreatCircle: {
            if (target.kind() != TargetKind::Sphere)
                throw std::invalid_argument("great_circle initial data requires a sphere target");
            BaseLoop base = base_loop(target, grid, spec.circle_radius, spec.winding);
            u.values = std::move(base.points);
            return u;
        }
        case InitialFamily::PerturbedCircle: {
            if (!curved)
                throw std::invalid_argument("perturbed_circle initial data requires a curved target");
            if (spec.amplitude > 0.5)
                throw std::invalid_argument("perturbed_circle: amplitude must be <= 0.5");
            BaseLoop base = base_loop(target, grid, spec.circle_radius, 1);
            add_seeded_modes(base, grid, spec.modes, spec.amplitude, spec.seed, true);
            u.values = std::move(base.points);
            break;
        }
        case InitialFamily::RandomBandLimited: {
            BaseLoop base = base_loop(target, grid, spec.circle_radius, 1);
            add_seeded_modes(base, grid, spec.modes, spec.amplitude, spec.seed, false);
            u.values = std::move(base.points);
            break;
        }
        case InitialFamily::FlatFourier: {
            if (target.kind() != TargetKind::Flat)
                throw std::invalid_argument("flat_fourier initial data requires a flat target");
            if (spec.fourier.empty())
                throw std::invalid_argument("flat_fourier: no coefficients given");
            for (const auto& [k, c] : spec.fourier) {
                if (k < 0 || k > grid.points / 2 - 1)
                    throw std::invalid_argument("flat_fourier: mode outside the resolved band");
                for (int j = 0; j < grid.points; ++j)
                    u.values.at(0, j) += c * std::cos(k * grid.node(j));
            }
            return u;
        }
    }

    if (curved) {
        double p[8], q[8];
        for (int j = 0; j < grid.points; ++j) {
            u.values.gather(j, p);
            if (!target.retract(p, q))
                throw std::domain_error("build_initial: perturbation left the retraction tube");
            u.values.scatter(j, q);
        }
    }
    return u;
}

}  // namespace geoflow
