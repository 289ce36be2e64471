#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "geoflow/grid.hpp"

namespace geoflow {

/// Counter-based deterministic draw in [-1, 1): splitmix64 of (seed, counter).
/// Independent of call order, identical across platforms.
double seeded_unit(uint64_t seed, uint64_t counter);

enum class InitialFamily { GreatCircle, PerturbedCircle, RandomBandLimited, FlatFourier };

InitialFamily family_from_string(const std::string& s);
std::string to_string(InitialFamily f);

struct InitialDataSpec {
    InitialFamily family = InitialFamily::GreatCircle;
    int winding = 1;          // great_circle
    int modes = 3;            // perturbation band K
    double amplitude = 0.1;   // a <= 0.5 so the retraction tube is respected
    double circle_radius = 0.5;  // hyperbolic latitude circle radius
    std::vector<std::pair<int, double>> fourier;  // flat_fourier: cosine coefficients per k
    uint64_t seed = 0;
};

/// Deterministic initial loop on the target. Sphere loops start from the
/// great circle in the (x1,x2)-plane, hyperbolic loops from the latitude
/// circle of Euclidean radius circle_radius on the upper hyperboloid sheet;
/// perturbations are seeded tangent-frame Fourier bumps followed by
/// retraction. Flat targets take coordinates directly.
MapState build_initial(const InitialDataSpec& spec, const LoopGrid& grid, const SpaceForm& target);

}  // namespace geoflow
