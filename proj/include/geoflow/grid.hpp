#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "geoflow/space_form.hpp"

namespace geoflow {

/// Uniform periodic grid on S^1 = [0, 2*pi), nodes x_j = j * dx.
struct LoopGrid {
    int points = 0;
    double dx = 0.0;

    LoopGrid() = default;
    explicit LoopGrid(int M) : points(M), dx(2.0 * std::numbers::pi / M) {
        if (M < 8) throw std::invalid_argument("LoopGrid: need at least 8 points");
    }

    double node(int j) const { return j * dx; }
    bool operator==(const LoopGrid& o) const { return points == o.points; }
};

/// coords x points samples, each coordinate row contiguous.
struct Field {
    int coords = 0;
    int points = 0;
    std::vector<double> data;

    Field() = default;
    Field(int c, int p) : coords(c), points(p), data(static_cast<size_t>(c) * p, 0.0) {}

    double* row(int c) { return data.data() + static_cast<size_t>(c) * points; }
    const double* row(int c) const { return data.data() + static_cast<size_t>(c) * points; }
    double& at(int c, int j) { return data[static_cast<size_t>(c) * points + j]; }
    double at(int c, int j) const { return data[static_cast<size_t>(c) * points + j]; }

    void gather(int j, double* v) const {
        for (int c = 0; c < coords; ++c) v[c] = data[static_cast<size_t>(c) * points + j];
    }
    void scatter(int j, const double* v) {
        for (int c = 0; c < coords; ++c) data[static_cast<size_t>(c) * points + j] = v[c];
    }

    bool same_shape(const Field& o) const { return coords == o.coords && points == o.points; }

    bool all_finite() const {
        for (double x : data)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

/// A periodic loop of ambient points constrained to the target manifold.
struct MapState {
    LoopGrid grid;
    SpaceForm target;
    Field values;

    MapState(LoopGrid g, SpaceForm t) : grid(g), target(t), values(t.ambient_dim(), g.points) {}

    Vec point(int j) const {
        Vec p(values.coords);
        values.gather(j, p.data());
        return p;
    }

    double max_residual() const {
        double v[8];
        double worst = 0.0;
        for (int j = 0; j < grid.points; ++j) {
            values.gather(j, v);
            worst = std::max(worst, target.on_manifold_residual(v));
        }
        return worst;
    }
};

/// Ambient vectors attached along a MapState, tangent to the target at each node.
struct TangentField {
    LoopGrid grid;
    Field vectors;

    TangentField() = default;
    TangentField(LoopGrid g, int ambient_dim) : grid(g), vectors(ambient_dim, g.points) {}

    Vec vector(int j) const {
        Vec v(vectors.coords);
        vectors.gather(j, v.data());
        return v;
    }
};

inline double max_tangency_residual(const MapState& u, const TangentField& V) {
    double p[8], v[8];
    double worst = 0.0;
    for (int j = 0; j < u.grid.points; ++j) {
        u.values.gather(j, p);
        V.vectors.gather(j, v);
        worst = std::max(worst, u.target.tangency_residual(p, v));
    }
    return worst;
}

}  // namespace geoflow
