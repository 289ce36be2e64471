#include "geoflow/config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace geoflow {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
    // shortest representation that round-trips
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::stod(buf) == v) break;
    }
    return buf;
}

double parse_double(const KeyValueMap& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing required key: " + key);
    try {
        size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("key " + key + ": not a number: " + it->second);
    }
}

double parse_double_or(const KeyValueMap& kv, const std::string& key, double fallback) {
    return kv.count(key) ? parse_double(kv, key) : fallback;
}

long parse_int(const KeyValueMap& kv, const std::string& key, long fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        size_t pos = 0;
        long v = std::stol(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("key " + key + ": not an integer: " + it->second);
    }
}

bool parse_bool(const KeyValueMap& kv, const std::string& key, bool fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw ConfigError("key " + key + ": expected true or false, got " + it->second);
}

std::string get_or(const KeyValueMap& kv, const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

std::vector<double> parse_list(const KeyValueMap& kv, const std::string& key) {
    auto it = kv.find(key);
    std::vector<double> out;
    if (it == kv.end()) return out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ConfigError("key " + key + ": bad list entry: " + item);
        }
    }
    return out;
}

std::string join_list(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += format_double(v[i]);
    }
    return s;
}

std::vector<std::pair<int, double>> parse_fourier(const std::string& text) {
    std::vector<std::pair<int, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("key fourier: entries must look like k:coeff, got " + item);
        try {
            out.emplace_back(std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        } catch (...) {
            throw ConfigError("key fourier: bad entry: " + item);
        }
    }
    return out;
}

std::string join_fourier(const std::vector<std::pair<int, double>>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i].first) + ":" + format_double(v[i].second);
    }
    return s;
}

}  // namespace

KeyValueMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    KeyValueMap kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') continue;  // cosmetic section header
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = val;
    }
    return kv;
}

void apply_override(KeyValueMap& kv, const std::string& assignment) {
    size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key=value: " + assignment);
    kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

Preset preset_from_string(const std::string& s) {
    if (s == "conservation") return Preset::Conservation;
    if (s == "airy") return Preset::Airy;
    if (s == "traveling_wave") return Preset::TravelingWave;
    if (s == "epsilon_sweep") return Preset::EpsilonSweep;
    if (s == "dt_order") return Preset::DtOrder;
    if (s == "long_time") return Preset::LongTime;
    if (s == "uniqueness_perturbation") return Preset::UniquenessPerturbation;
    throw ConfigError("unknown preset: " + s);
}

std::string to_string(Preset p) {
    switch (p) {
        case Preset::Conservation: return "conservation";
        case Preset::Airy: return "airy";
        case Preset::TravelingWave: return "traveling_wave";
        case Preset::EpsilonSweep: return "epsilon_sweep";
        case Preset::DtOrder: return "dt_order";
        case Preset::LongTime: return "long_time";
        case Preset::UniquenessPerturbation: return "uniqueness_perturbation";
    }
    return "?";
}

std::vector<Preset> all_presets() {
    return {Preset::Conservation, Preset::Airy,    Preset::TravelingWave,
            Preset::EpsilonSweep, Preset::DtOrder, Preset::LongTime,
            Preset::UniquenessPerturbation};
}

KeyValueMap preset_defaults(Preset p) {
    KeyValueMap kv;
    kv["preset"] = to_string(p);
    kv["target"] = "sphere";
    kv["dim"] = "2";
    kv["curvature_scale"] = "1";
    kv["grid_size"] = "256";
    kv["scheme"] = "spectral";
    kv["dealias"] = "true";
    kv["epsilon"] = "0";
    kv["dt"] = "auto";
    kv["safety"] = "0.5";
    kv["record_stride"] = "0";
    kv["seed"] = "42";
    kv["family"] = "perturbed_circle";
    kv["winding"] = "1";
    kv["modes"] = "3";
    kv["amplitude"] = "0.1";
    kv["circle_radius"] = "0.5";
    kv["output_dir"] = "out/" + to_string(p);
    switch (p) {
        case Preset::Conservation:
            kv["t_end"] = "0.05";
            break;
        case Preset::Airy:
            kv["target"] = "flat";
            kv["dim"] = "1";
            kv["grid_size"] = "128";
            kv["t_end"] = "0.5";
            kv["family"] = "flat_fourier";
            kv["fourier"] = "1:1,2:0.3";
            break;
        case Preset::TravelingWave:
            kv["grid_size"] = "64";
            kv["t_end"] = "1";
            kv["family"] = "great_circle";
            break;
        case Preset::EpsilonSweep:
            kv["grid_size"] = "128";
            kv["t_end"] = "0.02";
            kv["epsilons"] = "0.01,0.005,0.0025";
            break;
        case Preset::DtOrder:
            kv["grid_size"] = "8";
            kv["t_end"] = "1";
            kv["family"] = "great_circle";
            kv["dts"] = "0.04,0.02,0.01";
            break;
        case Preset::LongTime:
            kv["grid_size"] = "128";
            kv["t_end"] = "5";
            break;
        case Preset::UniquenessPerturbation:
            kv["grid_size"] = "128";
            kv["t_end"] = "0.05";
            kv["perturbation_size"] = "1e-06";
            break;
    }
    return kv;
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValueMap& kv) {
    ExperimentConfig cfg;
    auto it = kv.find("preset");
    if (it == kv.end()) throw ConfigError("missing required key: preset");
    cfg.preset = preset_from_string(it->second);

    const std::string target = get_or(kv, "target", "sphere");
    if (target == "sphere")
        cfg.target_kind = TargetKind::Sphere;
    else if (target == "hyperbolic")
        cfg.target_kind = TargetKind::Hyperbolic;
    else if (target == "flat")
        cfg.target_kind = TargetKind::Flat;
    else
        throw ConfigError("key target: must be sphere, hyperbolic or flat, got " + target);

    cfg.dim = static_cast<int>(parse_int(kv, "dim", 2));
    cfg.curvature_scale = parse_double_or(kv, "curvature_scale", 1.0);
    cfg.grid_size = static_cast<int>(parse_int(kv, "grid_size", 256));
    if (cfg.grid_size < 8) throw ConfigError("key grid_size: must be >= 8");

    cfg.flow.rho = parse_double(kv, "rho");  // the one key every run must state
    if (cfg.flow.rho <= 0.0) throw ConfigError("key rho: must be > 0");
    cfg.flow.epsilon = parse_double_or(kv, "epsilon", 0.0);
    if (cfg.flow.epsilon < 0.0) throw ConfigError("key epsilon: must be >= 0");
    cfg.flow.t_end = parse_double(kv, "t_end");
    if (cfg.flow.t_end <= 0.0) throw ConfigError("key t_end: must be > 0");

    const std::string dt = get_or(kv, "dt", "auto");
    if (dt == "auto") {
        cfg.dt_auto = true;
        cfg.flow.dt = 0.0;
    } else {
        cfg.dt_auto = false;
        KeyValueMap one{{"dt", dt}};
        cfg.flow.dt = parse_double(one, "dt");
        if (cfg.flow.dt <= 0.0) throw ConfigError("key dt: must be > 0 or auto");
    }
    cfg.flow.safety = parse_double_or(kv, "safety", 0.5);
    if (cfg.flow.safety <= 0.0 || cfg.flow.safety > 1.0)
        throw ConfigError("key safety: must be in (0, 1]");
    cfg.flow.scheme = scheme_from_string(get_or(kv, "scheme", "spectral"));
    cfg.flow.dealias = parse_bool(kv, "dealias", true);
    cfg.flow.record_stride = static_cast<int>(parse_int(kv, "record_stride", 0));
    cfg.flow.reproject_every_stage = parse_bool(kv, "reproject_every_stage", true);

    cfg.seed = static_cast<uint64_t>(parse_int(kv, "seed", 42));
    cfg.initial.seed = cfg.seed;
    cfg.initial.family = family_from_string(get_or(kv, "family", "perturbed_circle"));
    cfg.initial.winding = static_cast<int>(parse_int(kv, "winding", 1));
    cfg.initial.modes = static_cast<int>(parse_int(kv, "modes", 3));
    cfg.initial.amplitude = parse_double_or(kv, "amplitude", 0.1);
    cfg.initial.circle_radius = parse_double_or(kv, "circle_radius", 0.5);
    if (kv.count("fourier")) cfg.initial.fourier = parse_fourier(kv.at("fourier"));
    if (cfg.initial.family == InitialFamily::FlatFourier && cfg.initial.fourier.empty())
        throw ConfigError("missing required key: fourier (family = flat_fourier)");

    cfg.output_dir = get_or(kv, "output_dir", "out/" + to_string(cfg.preset));
    cfg.epsilons = parse_list(kv, "epsilons");
    cfg.dts = parse_list(kv, "dts");
    cfg.perturbation_size = parse_double_or(kv, "perturbation_size", 1e-6);

    if (cfg.preset == Preset::EpsilonSweep && cfg.epsilons.size() < 3)
        throw ConfigError("missing required key: epsilons (need >= 3 values)");
    if (cfg.preset == Preset::DtOrder && cfg.dts.size() < 3)
        throw ConfigError("missing required key: dts (need >= 3 values)");
    return cfg;
}

KeyValueMap ExperimentConfig::resolved() const {
    KeyValueMap kv;
    kv["preset"] = to_string(preset);
    kv["target"] = to_string(target_kind);
    kv["dim"] = std::to_string(dim);
    kv["curvature_scale"] = format_double(curvature_scale);
    kv["grid_size"] = std::to_string(grid_size);
    kv["rho"] = format_double(flow.rho);
    kv["epsilon"] = format_double(flow.epsilon);
    kv["t_end"] = format_double(flow.t_end);
    kv["dt"] = dt_auto ? "auto" : format_double(flow.dt);
    kv["safety"] = format_double(flow.safety);
    kv["scheme"] = to_string(flow.scheme);
    kv["dealias"] = flow.dealias ? "true" : "false";
    kv["record_stride"] = std::to_string(flow.record_stride);
    kv["reproject_every_stage"] = flow.reproject_every_stage ? "true" : "false";
    kv["seed"] = std::to_string(seed);
    kv["family"] = to_string(initial.family);
    kv["winding"] = std::to_string(initial.winding);
    kv["modes"] = std::to_string(initial.modes);
    kv["amplitude"] = format_double(initial.amplitude);
    kv["circle_radius"] = format_double(initial.circle_radius);
    if (!initial.fourier.empty()) kv["fourier"] = join_fourier(initial.fourier);
    kv["output_dir"] = output_dir;
    if (!epsilons.empty()) kv["epsilons"] = join_list(epsilons);
    if (!dts.empty()) kv["dts"] = join_list(dts);
    if (preset == Preset::UniquenessPerturbation)
        kv["perturbation_size"] = format_double(perturbation_size);
    return kv;
}

SpaceForm ExperimentConfig::make_target() const {
    switch (target_kind) {
        case TargetKind::Sphere: return SpaceForm::sphere(dim, curvature_scale);
        case TargetKind::Hyperbolic: return SpaceForm::hyperbolic(dim, curvature_scale);
        case TargetKind::Flat: return SpaceForm::flat(dim);
    }
    throw ConfigError("key target: invalid");
}

MapState ExperimentConfig::make_initial() const {
    return build_initial(initial, make_grid(), make_target());
}

ExperimentConfig load_experiment_config(const std::string& path,
                                        const std::vector<std::string>& overrides) {
    KeyValueMap file = parse_config_file(path);
    KeyValueMap merged = file;
    for (const auto& o : overrides) apply_override(merged, o);
    auto it = merged.find("preset");
    if (it == merged.end()) throw ConfigError("missing required key: preset");
    KeyValueMap kv = preset_defaults(preset_from_string(it->second));
    for (const auto& [k, v] : merged) kv[k] = v;
    return ExperimentConfig::from_kv(kv);
}

}  // namespace geoflow
