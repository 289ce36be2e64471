#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoflow/flow.hpp"
#include "geoflow/initial_data.hpp"

namespace geoflow {

/// Single-line diagnostic naming the offending key.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

using KeyValueMap = std::map<std::string, std::string>;

/// Flat key = value file; '#' starts a comment, [section] headers are
/// tolerated and ignored (all keys live in one namespace).
KeyValueMap parse_config_file(const std::string& path);
/// "key=value" command-line override.
void apply_override(KeyValueMap& kv, const std::string& assignment);

enum class Preset {
    Conservation,
    Airy,
    TravelingWave,
    EpsilonSweep,
    DtOrder,
    LongTime,
    UniquenessPerturbation
};

Preset preset_from_string(const std::string& s);
std::string to_string(Preset p);
std::vector<Preset> all_presets();

/// Defaults every preset starts from. rho is deliberately absent: the
/// physics coefficient must be stated in every run config.
KeyValueMap preset_defaults(Preset p);

struct ExperimentConfig {
    Preset preset = Preset::Conservation;
    TargetKind target_kind = TargetKind::Sphere;
    int dim = 2;
    double curvature_scale = 1.0;
    int grid_size = 256;
    FlowConfig flow;
    bool dt_auto = true;
    InitialDataSpec initial;
    uint64_t seed = 42;
    std::string output_dir = "out";
    std::vector<double> epsilons;       // epsilon_sweep
    std::vector<double> dts;            // dt_order
    double perturbation_size = 1e-6;    // uniqueness_perturbation

    /// Parse a fully merged key-value map (defaults + file + overrides).
    static ExperimentConfig from_kv(const KeyValueMap& kv);
    /// The exact flat map this config re-parses from (manifest round-trip).
    KeyValueMap resolved() const;

    SpaceForm make_target() const;
    LoopGrid make_grid() const { return LoopGrid(grid_size); }
    MapState make_initial() const;
};

/// defaults(preset in file/overrides) + file + overrides, then parse.
ExperimentConfig load_experiment_config(const std::string& path,
                                        const std::vector<std::string>& overrides);

}  // namespace geoflow
