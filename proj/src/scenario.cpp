#include "kslab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace kslab {

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw std::invalid_argument("scenario: " + what);
}

ExitEvent exit_event_from_string(const std::string& s) {
  if (s == "completed") return ExitEvent::Completed;
  if (s == "converged") return ExitEvent::Converged;
  if (s == "threshold_exceeded") return ExitEvent::ThresholdExceeded;
  bad("unknown exit event '" + s + "'");
}

}  // namespace

const char* to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::Mass: return "mass";
    case CheckKind::Lyapunov: return "lyapunov";
    case CheckKind::Envelope: return "envelope";
    case CheckKind::Rate: return "rate";
    case CheckKind::Scaling: return "scaling";
    case CheckKind::GrowUpTrend: return "grow-up-trend";
  }
  return "unknown";
}

CheckKind check_kind_from_string(const std::string& name) {
  if (name == "mass") return CheckKind::Mass;
  if (name == "lyapunov") return CheckKind::Lyapunov;
  if (name == "envelope") return CheckKind::Envelope;
  if (name == "rate") return CheckKind::Rate;
  if (name == "scaling") return CheckKind::Scaling;
  if (name == "grow-up-trend") return CheckKind::GrowUpTrend;
  bad("unknown check '" + name + "'");
}

Field generate_initial(const GeneratorSpec& gen, const Grid& grid) {
  Field u = grid.make_field();

  if (gen.kind == "constant_plus_cosine") {
    if (!(gen.base > 0.0)) bad("constant_plus_cosine needs base > 0");
    if (gen.amplitude < 0.0) bad("amplitude must be nonnegative");
    if (gen.amplitude >= gen.base)
      bad("amplitude >= base would break nonnegativity");
    if (gen.mode < 1) bad("mode must be a positive integer");
    const double L = grid.spec().extent[0];
    Field c = grid.make_field();
    for (std::size_t i = 0; i < grid.cell_count(); ++i)
      c[i] = std::cos(gen.mode * std::numbers::pi * grid.cell_center(i)[0] / L);
    const double mean = grid.integrate(c) / grid.domain_volume();
    for (std::size_t i = 0; i < u.values.size(); ++i)
      u[i] = gen.base + gen.amplitude * (c[i] - mean);
  } else if (gen.kind == "gaussian_bump") {
    if (!(gen.width > 0.0)) bad("gaussian_bump needs width > 0");
    if (!(gen.target_mass > 0.0)) bad("gaussian_bump needs target_mass > 0");
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
      const auto x = grid.cell_center(i);
      double d2 = (x[0] - gen.center[0]) * (x[0] - gen.center[0]);
      if (grid.axes() == 2)
        d2 += (x[1] - gen.center[1]) * (x[1] - gen.center[1]);
      u[i] = std::exp(-d2 / (2.0 * gen.width * gen.width));
    }
    const double q = grid.integrate(u);
    for (auto& x : u.values) x *= gen.target_mass / q;
  } else if (gen.kind == "random_perturbation") {
    if (!(gen.base > 0.0)) bad("random_perturbation needs base > 0");
    if (gen.amplitude < 0.0) bad("amplitude must be nonnegative");
    if (gen.amplitude >= gen.base)
      bad("amplitude >= base would break nonnegativity");
    std::mt19937_64 rng(gen.seed);
    for (auto& x : u.values) {
      const double xi = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      x = gen.base + gen.amplitude * (2.0 * xi - 1.0);
    }
  } else {
    bad("unknown generator kind '" + gen.kind + "'");
  }

  bool nonzero = false;
  for (double x : u.values) {
    if (x < 0.0) bad("generator produced a negative density");
    if (x > 0.0) nonzero = true;
  }
  if (!nonzero) bad("generator produced an identically zero density");
  return u;
}

GridSpec parse_grid(const nlohmann::json& j) {
  GridSpec spec;
  const std::string geom = j.at("geometry").get<std::string>();
  const auto& extent = j.at("extent");
  const auto& cells = j.at("cells");
  if (!extent.is_array() || !cells.is_array())
    bad("grid extent and cells must be arrays");

  auto axis = [&](const nlohmann::json& arr, int i) {
    return arr.at(static_cast<std::size_t>(i));
  };
  if (geom == "interval") {
    spec.geometry = Geometry::Interval;
    if (extent.size() != 1 || cells.size() != 1)
      bad("interval takes one extent and one cell count");
    spec.extent = {axis(extent, 0).get<double>(), 0.0};
    spec.cells = {axis(cells, 0).get<int>(), 0};
  } else if (geom == "rectangle") {
    spec.geometry = Geometry::Rectangle;
    if (extent.size() != 2 || cells.size() != 2)
      bad("rectangle takes two extents and two cell counts");
    spec.extent = {axis(extent, 0).get<double>(), axis(extent, 1).get<double>()};
    spec.cells = {axis(cells, 0).get<int>(), axis(cells, 1).get<int>()};
  } else if (geom == "radial_ball") {
    spec.geometry = Geometry::RadialBall;
    if (extent.size() != 1 || cells.size() != 1)
      bad("radial_ball takes one extent and one cell count");
    spec.extent = {axis(extent, 0).get<double>(), 0.0};
    spec.cells = {axis(cells, 0).get<int>(), 0};
    spec.ambient_dim = j.at("ambient_dim").get<int>();
  } else {
    bad("unknown geometry '" + geom + "'");
  }
  return spec;
}

nlohmann::json grid_to_json(const GridSpec& spec) {
  nlohmann::json j;
  switch (spec.geometry) {
    case Geometry::Interval:
      j["geometry"] = "interval";
      j["extent"] = {spec.extent[0]};
      j["cells"] = {spec.cells[0]};
      break;
    case Geometry::Rectangle:
      j["geometry"] = "rectangle";
      j["extent"] = {spec.extent[0], spec.extent[1]};
      j["cells"] = {spec.cells[0], spec.cells[1]};
      break;
    case Geometry::RadialBall:
      j["geometry"] = "radial_ball";
      j["extent"] = {spec.extent[0]};
      j["cells"] = {spec.cells[0]};
      j["ambient_dim"] = spec.ambient_dim;
      break;
  }
  return j;
}

MotilitySpec parse_motility(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  MotilitySpec spec;
  if (kind == "power_law") {
    spec = MotilitySpec::power_law(j.at("param").get<double>());
  } else if (kind == "exponential") {
    spec = MotilitySpec::exponential(j.at("param").get<double>());
  } else if (kind == "sqrt_exp") {
    spec = MotilitySpec::sqrt_exp();
  } else if (kind == "log_power") {
    spec = MotilitySpec::log_power(j.at("param").get<double>());
  } else {
    bad("unknown motility kind '" + kind + "'");
  }
  if (j.contains("s_min")) spec.s_min = j.at("s_min").get<double>();
  return spec;
}

GeneratorSpec parse_generator(const nlohmann::json& j) {
  GeneratorSpec g;
  g.kind = j.at("kind").get<std::string>();
  if (j.contains("base")) g.base = j.at("base").get<double>();
  if (j.contains("amplitude")) g.amplitude = j.at("amplitude").get<double>();
  if (j.contains("mode")) g.mode = j.at("mode").get<int>();
  if (j.contains("center")) {
    const auto& c = j.at("center");
    if (!c.is_array() || c.empty() || c.size() > 2)
      bad("generator center must be a 1- or 2-entry array");
    g.center[0] = c.at(0).get<double>();
    if (c.size() == 2) g.center[1] = c.at(1).get<double>();
  }
  if (j.contains("width")) g.width = j.at("width").get<double>();
  if (j.contains("target_mass")) g.target_mass = j.at("target_mass").get<double>();
  if (j.contains("seed")) g.seed = j.at("seed").get<std::uint64_t>();
  return g;
}

Scenario parse_scenario(const nlohmann::json& j) {
  Scenario s;
  s.name = j.at("name").get<std::string>();
  if (s.name.empty()) bad("name must not be empty");
  s.grid = parse_grid(j.at("grid"));
  s.motility = parse_motility(j.at("motility"));
  s.initial = parse_generator(j.at("initial"));

  const auto& sim = j.at("sim");
  if (sim.contains("dt")) s.sim.dt = sim.at("dt").get<double>();
  s.sim.t_end = sim.at("t_end").get<double>();
  if (sim.contains("convergence_tol"))
    s.sim.convergence_tol = sim.at("convergence_tol").get<double>();
  if (sim.contains("blowup_threshold"))
    s.sim.blowup_threshold = sim.at("blowup_threshold").get<double>();
  if (sim.contains("output_every"))
    s.sim.output_every = sim.at("output_every").get<int>();
  if (sim.contains("seed")) s.sim.seed = sim.at("seed").get<std::uint64_t>();
  if (sim.contains("residual_bound"))
    s.sim.residual_bound = sim.at("residual_bound").get<double>();
  if (sim.contains("max_dt_halvings"))
    s.sim.max_dt_halvings = sim.at("max_dt_halvings").get<int>();

  // The run seed doubles as the generator seed unless the generator pins one.
  if (!j.at("initial").contains("seed")) s.initial.seed = s.sim.seed;

  if (j.contains("checks"))
    for (const auto& c : j.at("checks"))
      s.checks.push_back(check_kind_from_string(c.get<std::string>()));
  if (j.contains("expected_exit"))
    s.expected_exit =
        exit_event_from_string(j.at("expected_exit").get<std::string>());
  if (j.contains("snapshots")) s.snapshots = j.at("snapshots").get<bool>();
  if (j.contains("scaling")) {
    const auto& sc = j.at("scaling");
    if (sc.contains("lambda")) s.scaling_lambda = sc.at("lambda").get<double>();
    if (sc.contains("tol")) s.scaling_tol = sc.at("tol").get<double>();
    if (!(s.scaling_lambda > 0.0)) bad("scaling lambda must be positive");
    if (!(s.scaling_tol > 0.0)) bad("scaling tol must be positive");
  }
  s.raw = j;
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  return parse_scenario(j);
}

nlohmann::json apply_overrides(nlohmann::json base,
                               const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0)
      bad("override '" + a + "' is not key=value");
    const std::string path = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);

    nlohmann::json value;
    try {
      value = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
      value = text;  // bare strings stay strings
    }

    nlohmann::json* node = &base;
    std::size_t start = 0;
    for (;;) {
      const auto dot = path.find('.', start);
      const std::string key = path.substr(start, dot - start);
      if (key.empty()) bad("override path '" + path + "' has an empty segment");
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      node = &(*node)[key];
      start = dot + 1;
    }
  }
  return base;
}

}  // namespace kslab
