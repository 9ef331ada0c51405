#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kslab/elliptic.hpp"
#include "kslab/grid.hpp"
#include "kslab/harness.hpp"
#include "kslab/motility.hpp"
#include "kslab/scenario.hpp"
#include "kslab/sweep.hpp"
#include "kslab/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

fs::path resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("KSLAB_OUT_DIR"); env && *env) return env;
  return "kslab-out";
}

// Accepts a path as given, with a .json suffix, or under scenarios/.
fs::path resolve_scenario_path(const std::string& arg) {
  const fs::path given(arg);
  if (fs::exists(given)) return given;
  if (fs::path with_ext = given; with_ext.replace_extension(".json"), fs::exists(with_ext))
    return with_ext;
  if (fs::path nested = fs::path("scenarios") / given.filename().replace_extension(".json");
      fs::exists(nested))
    return nested;
  throw std::runtime_error("scenario not found: " + arg);
}

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

json report_to_json(const kslab::AssumptionReport& r) {
  return json{{"tag", r.tag},
              {"holds", r.holds},
              {"has_violation", r.has_violation},
              {"violation_s", r.violation_s},
              {"violation_value", r.violation_value},
              {"certified_range", {r.certified_range[0], r.certified_range[1]}},
              {"samples", r.samples}};
}

int cmd_run(const std::string& scenario_arg, const std::vector<std::string>& sets,
            const std::string& out_flag) {
  json doc = load_json_file(resolve_scenario_path(scenario_arg));
  doc = kslab::apply_overrides(std::move(doc), sets);
  const kslab::Scenario scenario = kslab::parse_scenario(doc);
  const kslab::RunManifest manifest = kslab::run_scenario(scenario, resolve_out_dir(out_flag));
  std::cout << kslab::manifest_to_json(manifest).dump(2) << "\n";
  return manifest.exit_code;
}

int cmd_check_gamma(const std::string& motility_arg, const std::string& range_arg, double k_arg) {
  const kslab::MotilitySpec spec = kslab::parse_motility(load_json_file(motility_arg));
  kslab::SampleRange range;
  if (!range_arg.empty()) {
    const auto comma = range_arg.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("--range expects two comma-separated numbers");
    range.lo = std::stod(range_arg.substr(0, comma));
    range.hi = std::stod(range_arg.substr(comma + 1));
  }

  const auto a0 = kslab::check_A0(spec, range);
  const auto a1 = kslab::check_A1(spec, range);
  const double l0 = kslab::a3_sup_l0(spec, range);

  json out{{"motility", {{"kind", to_string(spec.kind)}, {"param", spec.param}}},
           {"range", {range.lo, range.hi}},
           {"A0", report_to_json(a0)},
           {"A1", report_to_json(a1)},
           {"a3_sup_l0", std::isfinite(l0) ? json(l0) : json()}};
  double k = k_arg;
  if (k <= 0.0 && std::isfinite(l0) && l0 > 1.0) {
    out["implied_k"] = kslab::a3_implies_a2_k(l0);
    k = kslab::a3_implies_a2_k(l0) * 1.01;  // strict side of the implied bound
  }
  if (k > 0.0) out["A2"] = report_to_json(kslab::check_A2(spec, k));
  std::cout << out.dump(2) << "\n";
  return (a0.holds && a1.holds) ? kslab::kExitOk : kslab::kExitPhysics;
}

int cmd_eig(const std::string& grid_arg) {
  const kslab::GridSpec spec = kslab::parse_grid(load_json_file(grid_arg));
  const kslab::Grid grid = kslab::Grid::build(spec);
  const double analytic = kslab::neumann_mu1(grid);
  const double numeric = kslab::neumann_mu1_numeric(grid);
  json out{{"grid", kslab::grid_to_json(spec)},
           {"mu1", analytic},
           {"mu1_numeric", numeric},
           {"rel_gap", std::abs(numeric - analytic) / analytic}};
  std::cout << out.dump(2) << "\n";
  return kslab::kExitOk;
}

int cmd_sweep(const std::string& scenario_arg, const std::string& grid_file,
              const std::string& out_flag) {
  const json base = load_json_file(resolve_scenario_path(scenario_arg));
  std::ifstream in(grid_file);
  if (!in) throw std::runtime_error("cannot open " + grid_file);
  const ordered_json grid = ordered_json::parse(in);  // key order defines cell order
  const kslab::SweepResult sweep = kslab::run_sweep(base, grid, resolve_out_dir(out_flag));
  std::size_t failed = 0;
  for (const auto& cell : sweep.cells)
    if (!cell.ok || cell.manifest.exit_code != 0) ++failed;
  std::cout << "sweep: " << sweep.cells.size() << " cells, " << failed << " failed, aggregate "
            << sweep.aggregate_path.string() << "\n";
  return sweep.exit_code;
}

int cmd_report(const std::string& dir_arg) {
  const fs::path root(dir_arg);
  if (!fs::exists(root)) throw std::runtime_error("no such directory: " + dir_arg);
  std::map<std::string, kslab::RunManifest> found;  // sorted by scenario name
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().filename() != "manifest.json") continue;
    kslab::RunManifest m = kslab::load_manifest_file(entry.path());
    std::string name = m.scenario.contains("name") ? m.scenario["name"].get<std::string>()
                                                   : entry.path().parent_path().string();
    found.emplace(std::move(name), std::move(m));
  }
  int worst = kslab::kExitOk;
  for (const auto& [name, m] : found) {
    std::string checks;
    for (const auto& c : m.checks) {
      if (!checks.empty()) checks += " ";
      checks += to_string(c.kind);
      checks += !c.applicable ? ":n/a" : (c.pass ? ":pass" : ":FAIL");
    }
    std::printf("%-32s exit=%d event=%s steps=%zu t=%.6g %s\n", name.c_str(), m.exit_code,
                to_string(m.exit_event), m.steps, m.final_t, checks.c_str());
    worst = std::max(worst, m.exit_code);
  }
  std::printf("%zu manifest(s), worst exit %d\n", found.size(), worst);
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for degenerate chemotaxis dynamics"};
  app.require_subcommand(1);

  std::string scenario_arg, out_flag, motility_arg, range_arg, grid_arg, grid_file, dir_arg;
  std::vector<std::string> sets;
  double k_arg = 0.0;

  auto* run = app.add_subcommand("run", "run one scenario and write its artifacts");
  run->add_option("scenario", scenario_arg, "scenario name or JSON path")->required();
  run->add_option("--set", sets, "override a scenario field, e.g. --set sim.dt=0.001");
  run->add_option("--out", out_flag, "output directory (default $KSLAB_OUT_DIR or kslab-out)");

  auto* cg = app.add_subcommand("check-gamma", "certify structural assumptions on a motility");
  cg->add_option("motility", motility_arg, "motility JSON path")->required();
  cg->add_option("--range", range_arg, "sampling range as lo,hi");
  cg->add_option("--k", k_arg, "exponent for the divergence trend check");

  auto* eig = app.add_subcommand("eig", "first nonzero Neumann eigenvalue of a grid");
  eig->add_option("grid", grid_arg, "grid JSON path")->required();

  auto* sw = app.add_subcommand("sweep", "run a scenario over a parameter grid");
  sw->add_option("scenario", scenario_arg, "base scenario name or JSON path")->required();
  sw->add_option("--grid", grid_file, "JSON object {dotted.path: [values...]}")->required();
  sw->add_option("--out", out_flag, "output directory (default $KSLAB_OUT_DIR or kslab-out)");

  auto* rep = app.add_subcommand("report", "summarize every manifest under a directory");
  rep->add_option("dir", dir_arg, "directory to scan recursively")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_arg, sets, out_flag);
    if (cg->parsed()) return cmd_check_gamma(motility_arg, range_arg, k_arg);
    if (eig->parsed()) return cmd_eig(grid_arg);
    if (sw->parsed()) return cmd_sweep(scenario_arg, grid_file, out_flag);
    if (rep->parsed()) return cmd_report(dir_arg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kslab::kExitOperational;
  }
  return kslab::kExitOperational;
}
