#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kslab/grid.hpp"
#include "kslab/integrator.hpp"
#include "kslab/motility.hpp"

namespace kslab {

enum class CheckKind { Mass, Lyapunov, Envelope, Rate, Scaling, GrowUpTrend };

const char* to_string(CheckKind kind);
CheckKind check_kind_from_string(const std::string& name);

// Initial-density recipe. All kinds produce u0 >= 0, u0 not identically zero.
struct GeneratorSpec {
  std::string kind;  // constant_plus_cosine | gaussian_bump | random_perturbation
  double base = 1.0;
  double amplitude = 0.0;
  int mode = 1;
  std::array<double, 2> center{0.0, 0.0};
  double width = 0.1;
  double target_mass = 1.0;
  std::uint64_t seed = 0;
};

// constant_plus_cosine keeps the volume-weighted mean at exactly base;
// gaussian_bump normalizes by its own quadrature so the integral is exactly
// target_mass; random_perturbation is bitwise deterministic per seed.
Field generate_initial(const GeneratorSpec& gen, const Grid& grid);

struct Scenario {
  std::string name;
  GridSpec grid;
  MotilitySpec motility;
  GeneratorSpec initial;
  SimConfig sim;
  std::vector<CheckKind> checks;
  std::optional<ExitEvent> expected_exit;
  bool snapshots = false;
  double scaling_lambda = 2.0;
  double scaling_tol = 5e-3;
  nlohmann::json raw;  // canonical form, echoed into the manifest
};

GridSpec parse_grid(const nlohmann::json& j);
nlohmann::json grid_to_json(const GridSpec& spec);

// Built-in kinds only; the callable-backed Custom kind has no JSON form.
MotilitySpec parse_motility(const nlohmann::json& j);

GeneratorSpec parse_generator(const nlohmann::json& j);

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario_file(const std::string& path);

// Applies "dotted.path=value" assignments; values parse as JSON scalars with
// bare-string fallback.
nlohmann::json apply_overrides(nlohmann::json base,
                               const std::vector<std::string>& assignments);

}  // namespace kslab
