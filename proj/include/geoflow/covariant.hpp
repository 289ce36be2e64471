#pragma once

#include <memory>
#include <vector>

#include "geoflow/derivatives.hpp"
#include "geoflow/grid.hpp"

namespace geoflow {

/// Covariant derivative machinery along a loop: ambient differentiation
/// followed by tangent projection at every node, so each field in the stack
/// stays in the pull-back tangent bundle. Owns the spectral engine and scratch
/// for one (target, grid, scheme) combination; reusable across states.
class Differentiator {
public:
    Differentiator(const SpaceForm& target, LoopGrid grid, Scheme scheme = Scheme::Spectral);

    const SpaceForm& target() const { return target_; }
    const LoopGrid& grid() const { return grid_; }
    Scheme scheme() const { return scheme_; }

    void ambient_derivative(const Field& in, Field& out, int order);

    /// u_x: first ambient derivative projected tangent at each node.
    TangentField velocity(const MapState& u);
    void velocity(const MapState& u, TangentField& out);

    /// nabla_x V = P(u) D_x V, computed per node. Linear in V.
    TangentField cov_deriv(const MapState& u, const TangentField& V);
    void cov_deriv(const MapState& u, const TangentField& V, TangentField& out);

    /// [u_x, nabla_x u_x, ..., nabla_x^depth u_x]; depth <= 5.
    std::vector<TangentField> cov_stack(const MapState& u, int depth);
    void cov_stack(const MapState& u, int depth, std::vector<TangentField>& out);

    /// 2/3-rule low-pass of every coordinate row (spectral scheme only;
    /// FD schemes copy through).
    void lowpass(const Field& in, Field& out);

private:
    void project_nodes(const MapState& u, Field& f);

    SpaceForm target_;
    LoopGrid grid_;
    Scheme scheme_;
    std::unique_ptr<SpectralEngine> engine_;
    Field scratch_;
};

/// Max depth of the covariant stack; iterated projections past this are not
/// accurate enough to be useful at desk-scale grids.
inline constexpr int kMaxStackDepth = 5;

}  // namespace geoflow
