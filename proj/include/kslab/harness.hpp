#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "kslab/runner.hpp"
#include "kslab/scenario.hpp"
#include "kslab/theory.hpp"

namespace kslab {

inline constexpr const char* kArtifactVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitOperational = 1;
inline constexpr int kExitPhysics = 2;
inline constexpr int kExitInvariant = 3;

struct CheckVerdict {
  CheckKind kind = CheckKind::Mass;
  bool applicable = true;
  bool pass = false;
  double value = 0.0;  // measured quantity
  double bound = 0.0;  // threshold it was held against
  std::string detail;
};

struct RunManifest {
  nlohmann::json scenario;  // canonical echo of the scenario definition
  std::string config_hash;  // stable under key reordering of the input JSON
  TheoryReport theory;
  ExitEvent exit_event = ExitEvent::Completed;
  bool expected_exit_ok = true;
  bool invariants_ok = true;  // mass drift and positivity floor
  std::vector<CheckVerdict> checks;
  double max_rel_mass_drift = 0.0;
  double min_u_seen = 0.0;
  double vstar_est = 0.0;
  double dt_used = 0.0;
  int dt_halvings = 0;
  std::int64_t steps = 0;
  double final_t = 0.0;
  double wall_ms = 0.0;
  // Summary fields every manifest carries, so sweep aggregates need no series
  // re-read: trailing-window fit of dist_v_h1 (NaN when not decaying) and the
  // max_v trend over the trailing half of the records.
  double fitted_rate = 0.0;
  double fit_r_squared = 0.0;
  double max_v_growth = 0.0;
  bool max_v_increasing = false;
  std::string series_path;  // relative to the manifest directory
  std::vector<std::string> snapshot_paths;
  int exit_code = kExitOk;
};

std::string scenario_config_hash(const nlohmann::json& scenario);

// Runs the scenario, evaluates its checks, and writes series.csv, optional
// snapshots, and manifest.json under out_dir/<scenario name>/.
RunManifest run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

nlohmann::json theory_to_json(const TheoryReport& t);
TheoryReport theory_from_json(const nlohmann::json& j);

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest load_manifest_file(const std::filesystem::path& path);

}  // namespace kslab
