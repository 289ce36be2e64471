#include "geoflow/covariant.hpp"

#include <stdexcept>

#include "geoflow/detail/rowops.hpp"

namespace geoflow {

Differentiator::Differentiator(const SpaceForm& target, LoopGrid grid, Scheme scheme)
    : target_(target), grid_(grid), scheme_(scheme),
      scratch_(2, grid.points) {
    if (scheme_ == Scheme::Spectral)
        engine_ = std::make_unique<SpectralEngine>(grid.points, target.ambient_dim());
}

void Differentiator::ambient_derivative(const Field& in, Field& out, int order) {
    if (in.points != grid_.points)
        throw std::invalid_argument("Differentiator: field does not match the grid");
    ambient_deriv(in, out, grid_.dx, order, scheme_, engine_.get());
}

void Differentiator::project_nodes(const MapState& u, Field& f) {
    detail::project_field(target_, u.values, f, scratch_.row(0), scratch_.row(1));
}

void Differentiator::velocity(const MapState& u, TangentField& out) {
    if (!out.vectors.same_shape(u.values)) out = TangentField(grid_, target_.ambient_dim());
    ambient_derivative(u.values, out.vectors, 1);
    project_nodes(u, out.vectors);
}

TangentField Differentiator::velocity(const MapState& u) {
    TangentField out(grid_, target_.ambient_dim());
    velocity(u, out);
    return out;
}

void Differentiator::cov_deriv(const MapState& u, const TangentField& V, TangentField& out) {
    if (!out.vectors.same_shape(V.vectors)) out = TangentField(grid_, target_.ambient_dim());
    ambient_derivative(V.vectors, out.vectors, 1);
    project_nodes(u, out.vectors);
}

TangentField Differentiator::cov_deriv(const MapState& u, const TangentField& V) {
    TangentField out(grid_, target_.ambient_dim());
    cov_deriv(u, V, out);
    return out;
}

void Differentiator::cov_stack(const MapState& u, int depth, std::vector<TangentField>& out) {
    if (depth < 0 || depth > kMaxStackDepth)
        throw std::invalid_argument("cov_stack: depth must be in 0..5");
    out.resize(depth + 1);
    velocity(u, out[0]);
    for (int k = 1; k <= depth; ++k) cov_deriv(u, out[k - 1], out[k]);
}

std::vector<TangentField> Differentiator::cov_stack(const MapState& u, int depth) {
    std::vector<TangentField> out;
    cov_stack(u, depth, out);
    return out;
}

void Differentiator::lowpass(const Field& in, Field& out) {
    if (!out.same_shape(in)) out = Field(in.coords, in.points);
    if (scheme_ != Scheme::Spectral) {
        out.data = in.data;
        return;
    }
    engine_->lowpass_two_thirds_field(in, out);
}

}  // namespace geoflow
