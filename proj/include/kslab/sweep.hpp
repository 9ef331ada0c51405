#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kslab/harness.hpp"

namespace kslab {

struct SweepCell {
  std::vector<std::pair<std::string, nlohmann::json>> params;  // declared order
  bool ok = false;       // ran without an operational error
  std::string error;     // populated when !ok
  RunManifest manifest;  // valid when ok
};

struct SweepResult {
  std::vector<SweepCell> cells;  // declared cartesian order
  std::string aggregate_csv;     // also written under out_dir
  std::filesystem::path aggregate_path;
  int exit_code = 0;
};

// grid is an ordered object {dotted.path: [values...]}; cells enumerate the
// cartesian product with the first key outermost. Runs execute concurrently;
// aggregate rows keep the declared order. Per-cell failures land in their row
// and the sweep continues.
SweepResult run_sweep(const nlohmann::json& base_scenario,
                      const nlohmann::ordered_json& grid,
                      const std::filesystem::path& out_dir);

}  // namespace kslab
