#pragma once

#include <iosfwd>

#include "geoflow/config.hpp"
#include "geoflow/oracles.hpp"

namespace geoflow {

inline constexpr const char* kToolVersion = "geoflow 0.1.0";

// Exit codes of the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitBlowUp = 3;
inline constexpr int kExitCheckFailed = 4;

/// Run one experiment preset: integrate, audit, and write artifacts
/// (manifest.json, result.json, diagnostics.csv and audit_*.json where the
/// preset produces a primary trajectory) under cfg.output_dir. With
/// check_thresholds, the preset's acceptance numbers are enforced and a
/// failing run exits with kExitCheckFailed. Progress goes to `log`.
int run_experiment(const ExperimentConfig& cfg, bool check_thresholds, std::ostream& log);

/// One EnergyReport row in the fixed CSV column order, full precision.
std::string energy_csv_row(const EnergyReport& r);

void write_diagnostics_csv(const std::string& path, const Trajectory& traj);
void write_audit_json(const std::string& path, const AuditResult& audit);
void write_manifest(const std::string& path, const ExperimentConfig& cfg);

}  // namespace geoflow
