#include "kslab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "kslab/csv.hpp"
#include "kslab/elliptic.hpp"
#include "kslab/hashing.hpp"

namespace kslab {

namespace {

ExitEvent exit_event_from_string(const std::string& s) {
  if (s == "completed") return ExitEvent::Completed;
  if (s == "converged") return ExitEvent::Converged;
  if (s == "threshold_exceeded") return ExitEvent::ThresholdExceeded;
  throw std::invalid_argument("manifest: unknown exit event '" + s + "'");
}

double linf(const Field& f) {
  double m = 0.0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

// JSON has no NaN/inf literals; they round-trip as null.
nlohmann::json json_num(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

double num_from(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

CheckVerdict check_mass(const RunResult& run) {
  CheckVerdict v;
  v.kind = CheckKind::Mass;
  v.value = run.max_rel_mass_drift;
  v.bound = 1e-10;
  v.pass = v.value < v.bound;
  v.detail = "max relative mass drift over the run";
  return v;
}

CheckVerdict check_lyapunov(const RunResult& run, const MotilitySpec& motility) {
  CheckVerdict v;
  v.kind = CheckKind::Lyapunov;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  double d2min = std::numeric_limits<double>::infinity();
  for (const auto& r : run.series) {
    lo = std::min(lo, r.min_v);
    hi = std::max(hi, r.max_v);
    d2min = std::min(d2min, r.dissipation_D2);
  }
  AssumptionReport a1 =
      check_A1(motility, {lo, std::max(hi, lo * (1.0 + 1e-9))}, 2048);
  if (!a1.holds) {
    v.pass = false;
    v.detail = "motility is not sign-certified on the realized signal range [" +
               format_double(lo) + ", " + format_double(hi) + "]";
    return v;
  }
  LyapunovAudit audit = lyapunov_audit(run.series, run.dt_used);
  v.value = audit.max_increase;
  v.bound = audit.tol_E;
  v.pass = audit.monotone && d2min >= -1e-10;
  v.detail = "max energy increase vs scheme tolerance; min D2 = " +
             format_double(d2min);
  return v;
}

CheckVerdict check_envelope(const RunResult& run) {
  CheckVerdict v;
  v.kind = CheckKind::Envelope;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : run.series) worst = std::min(worst, r.envelope_margin);
  v.value = worst;
  v.bound = -1e-8;
  v.pass = worst >= v.bound;
  v.detail = "min envelope margin over recorded times";
  return v;
}

CheckVerdict check_rate(const RunResult& run, const TheoryReport& theory) {
  CheckVerdict v;
  v.kind = CheckKind::Rate;
  RateCheckResult rc = rate_check(run.series, theory);
  v.applicable = rc.applicable;
  v.value = rc.fitted;
  v.bound = -(1.0 - 0.15) * theory.predicted_rate;  // fitted slope must sit below
  v.pass = rc.applicable && rc.pass && rc.r_squared > 0.99;
  v.detail = "fitted slope " + format_double(rc.fitted) + " vs predicted rate " +
             format_double(theory.predicted_rate) + " (r2 " +
             format_double(rc.r_squared) + ")";
  return v;
}

CheckVerdict check_growup(const RunResult& run) {
  CheckVerdict v;
  v.kind = CheckKind::GrowUpTrend;
  const auto& s = run.series;
  if (s.size() < 4) {
    v.applicable = false;
    v.pass = false;
    v.detail = "too few records to judge a trend";
    return v;
  }
  const std::size_t mid = s.size() / 2;
  bool increasing = true;
  for (std::size_t j = mid; j + 1 < s.size(); ++j)
    increasing = increasing && s[j + 1].max_v > s[j].max_v;
  v.value = s.back().max_v - s[mid].max_v;
  v.bound = 0.0;
  v.pass = increasing;
  v.detail = "max_v strictly increasing over the trailing half of the records";
  return v;
}

CheckVerdict check_scaling(const Scenario& s, const Grid& grid,
                           const HelmholtzSolver& solver, const Field& u0,
                           const RunResult& base) {
  CheckVerdict v;
  v.kind = CheckKind::Scaling;
  v.bound = s.scaling_tol;
  if (s.motility.kind != MotilityKind::PowerLaw) {
    v.applicable = false;
    v.detail = "rescaling invariance needs a power-law motility";
    return v;
  }
  if (base.trajectory.size() < 2) {
    v.applicable = false;
    v.detail = "base run stored no trajectory to rescale";
    return v;
  }
  const double lambda = s.scaling_lambda;
  const double k = s.motility.param;

  Field u0_scaled = u0;
  for (auto& x : u0_scaled.values) x *= lambda;
  SimConfig cfg = s.sim;
  cfg.convergence_tol = 0.0;  // the partner must cover the full horizon
  if (std::isfinite(cfg.blowup_threshold)) cfg.blowup_threshold *= lambda;
  RunOptions opt;
  opt.store_trajectory = true;
  opt.trajectory_every = 1;
  RunResult direct = run_simulation(u0_scaled, cfg, s.motility, grid, solver, opt);

  Trajectory traj;
  traj.times.reserve(base.trajectory.size());
  for (const auto& snap : base.trajectory) {
    traj.times.push_back(snap.t);
    traj.states.push_back(snap.u);
  }
  const double accel = std::pow(lambda, -k);
  const double cover = traj.times.back();

  double err = 0.0;
  std::size_t compared = 0;
  for (const auto& snap : direct.trajectory) {
    if (accel * snap.t > cover) break;
    Field partner = scaling_partner(traj, lambda, k, snap.t, grid);
    for (std::size_t i = 0; i < partner.values.size(); ++i)
      err = std::max(err, std::abs(partner.values[i] - snap.u.values[i]));
    ++compared;
  }
  v.value = err;
  v.pass = compared >= 2 && err < s.scaling_tol;
  v.detail = "sup distance between the rescaled base run and the direct run from " +
             format_double(lambda) + " u0 over " + std::to_string(compared) +
             " snapshots";
  return v;
}

nlohmann::json verdict_to_json(const CheckVerdict& v) {
  return {{"kind", to_string(v.kind)}, {"applicable", v.applicable},
          {"pass", v.pass},           {"value", json_num(v.value)},
          {"bound", json_num(v.bound)}, {"detail", v.detail}};
}

CheckVerdict verdict_from_json(const nlohmann::json& j) {
  CheckVerdict v;
  v.kind = check_kind_from_string(j.at("kind").get<std::string>());
  v.applicable = j.at("applicable").get<bool>();
  v.pass = j.at("pass").get<bool>();
  v.value = num_from(j.at("value"));
  v.bound = num_from(j.at("bound"));
  v.detail = j.at("detail").get<std::string>();
  return v;
}

}  // namespace

std::string scenario_config_hash(const nlohmann::json& scenario) {
  std::uint64_t h = fnv1a64(kArtifactVersion);
  h = fnv1a64(scenario.dump(), h);
  return hex64(h);
}

RunManifest run_scenario(const Scenario& s, const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();

  Grid grid = Grid::build(s.grid);
  HelmholtzSolver solver(grid);
  Field u0 = generate_initial(s.initial, grid);

  const bool wants_scaling =
      std::find(s.checks.begin(), s.checks.end(), CheckKind::Scaling) !=
      s.checks.end();
  RunOptions opt;
  opt.store_trajectory = wants_scaling || s.snapshots;
  opt.trajectory_every = wants_scaling ? 1 : s.sim.output_every;

  RunResult run = run_simulation(u0, s.sim, s.motility, grid, solver, opt);

  RunManifest m;
  m.scenario = s.raw;
  m.config_hash = scenario_config_hash(s.raw);
  m.theory = make_theory_report(grid, s.motility, run.vstar_est);
  m.exit_event = run.exit_event;
  m.expected_exit_ok = !s.expected_exit || *s.expected_exit == run.exit_event;
  m.max_rel_mass_drift = run.max_rel_mass_drift;
  m.min_u_seen = run.min_u_seen;
  m.vstar_est = run.vstar_est;
  m.dt_used = run.dt_used;
  m.dt_halvings = run.dt_halvings;
  m.steps = run.final_state.step;
  m.final_t = run.final_state.t;

  const bool mass_ok = run.max_rel_mass_drift < 1e-10;
  const bool positive_ok = run.min_u_seen >= -1e-12 * linf(u0);
  m.invariants_ok = mass_ok && positive_ok;

  {
    RateCheckResult rc = rate_check(run.series, m.theory);
    m.fitted_rate = rc.applicable ? rc.fitted
                                  : std::numeric_limits<double>::quiet_NaN();
    m.fit_r_squared = rc.applicable ? rc.r_squared
                                    : std::numeric_limits<double>::quiet_NaN();
    const auto& sr = run.series;
    const std::size_t mid = sr.size() / 2;
    m.max_v_growth = sr.back().max_v - sr[mid].max_v;
    m.max_v_increasing = sr.size() >= 4;
    for (std::size_t j = mid; j + 1 < sr.size(); ++j)
      m.max_v_increasing = m.max_v_increasing && sr[j + 1].max_v > sr[j].max_v;
  }

  for (CheckKind kind : s.checks) {
    switch (kind) {
      case CheckKind::Mass: m.checks.push_back(check_mass(run)); break;
      case CheckKind::Lyapunov:
        m.checks.push_back(check_lyapunov(run, s.motility));
        break;
      case CheckKind::Envelope: m.checks.push_back(check_envelope(run)); break;
      case CheckKind::Rate: m.checks.push_back(check_rate(run, m.theory)); break;
      case CheckKind::Scaling:
        m.checks.push_back(check_scaling(s, grid, solver, u0, run));
        break;
      case CheckKind::GrowUpTrend: m.checks.push_back(check_growup(run)); break;
    }
  }

  bool checks_ok = m.expected_exit_ok;
  for (const auto& v : m.checks) checks_ok = checks_ok && v.pass;
  m.exit_code = !m.invariants_ok ? kExitInvariant
                                 : (!checks_ok ? kExitPhysics : kExitOk);

  const std::filesystem::path dir = out_dir / s.name;
  std::filesystem::create_directories(dir);
  m.series_path = "series.csv";
  write_series_csv(dir / m.series_path, run.series);

  if (s.snapshots) {
    const std::string descriptor = grid_to_json(s.grid).dump();
    const int stride = wants_scaling ? s.sim.output_every : 1;
    for (std::size_t j = 0; j < run.trajectory.size(); ++j) {
      if (stride > 1 && j % static_cast<std::size_t>(stride) != 0 &&
          j + 1 != run.trajectory.size())
        continue;
      char name[32];
      std::snprintf(name, sizeof(name), "snapshot_%06zu.csv", j);
      const Field& u = run.trajectory[j].u;
      Field v = solver.solve(u);
      write_snapshot_csv(dir / name, descriptor, grid, u, v);
      m.snapshot_paths.push_back(name);
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  m.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

  write_manifest(dir / "manifest.json", m);
  return m;
}

nlohmann::json theory_to_json(const TheoryReport& t) {
  nlohmann::json j;
  j["ambient_dim"] = t.ambient_dim;
  j["mu1"] = t.mu1;
  j["vstar"] = t.vstar;
  j["gamma_at_vstar"] = t.gamma_at_vstar;
  j["predicted_rate"] = t.predicted_rate;
  j["envelope_growth"] = t.envelope_growth;
  if (t.has_admissible_k) {
    nlohmann::json band;
    band["lo"] = t.admissible_k.lo;
    if (std::isfinite(t.admissible_k.hi)) {
      band["hi"] = t.admissible_k.hi;
      band["hi_inclusive"] = t.admissible_k.hi_inclusive;
    } else {
      band["hi"] = nullptr;
      band["hi_inclusive"] = false;
    }
    j["admissible_k"] = band;
  }
  if (t.has_power_k) j["power_k"] = t.power_k;
  if (t.has_critical_mass) j["critical_mass"] = t.critical_mass;
  return j;
}

TheoryReport theory_from_json(const nlohmann::json& j) {
  TheoryReport t;
  t.ambient_dim = j.at("ambient_dim").get<int>();
  t.mu1 = j.at("mu1").get<double>();
  t.vstar = j.at("vstar").get<double>();
  t.gamma_at_vstar = j.at("gamma_at_vstar").get<double>();
  t.predicted_rate = j.at("predicted_rate").get<double>();
  t.envelope_growth = j.at("envelope_growth").get<double>();
  if (j.contains("admissible_k")) {
    t.has_admissible_k = true;
    const auto& band = j.at("admissible_k");
    t.admissible_k.lo = band.at("lo").get<double>();
    if (band.at("hi").is_null()) {
      t.admissible_k.hi = std::numeric_limits<double>::infinity();
      t.admissible_k.hi_inclusive = false;
    } else {
      t.admissible_k.hi = band.at("hi").get<double>();
      t.admissible_k.hi_inclusive = band.at("hi_inclusive").get<bool>();
    }
  }
  if (j.contains("power_k")) {
    t.has_power_k = true;
    t.power_k = j.at("power_k").get<double>();
  }
  if (j.contains("critical_mass")) {
    t.has_critical_mass = true;
    t.critical_mass = j.at("critical_mass").get<double>();
  }
  return t;
}

nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["artifact_version"] = kArtifactVersion;
  j["scenario"] = m.scenario;
  j["config_hash"] = m.config_hash;
  j["theory"] = theory_to_json(m.theory);
  j["run"] = {{"exit_event", to_string(m.exit_event)},
              {"expected_exit_ok", m.expected_exit_ok},
              {"invariants_ok", m.invariants_ok},
              {"max_rel_mass_drift", json_num(m.max_rel_mass_drift)},
              {"min_u_seen", json_num(m.min_u_seen)},
              {"vstar_est", json_num(m.vstar_est)},
              {"dt_used", json_num(m.dt_used)},
              {"dt_halvings", m.dt_halvings},
              {"steps", m.steps},
              {"final_t", json_num(m.final_t)},
              {"wall_ms", json_num(m.wall_ms)},
              {"fitted_rate", json_num(m.fitted_rate)},
              {"fit_r_squared", json_num(m.fit_r_squared)},
              {"max_v_growth", json_num(m.max_v_growth)},
              {"max_v_increasing", m.max_v_increasing}};
  j["checks"] = nlohmann::json::array();
  for (const auto& v : m.checks) j["checks"].push_back(verdict_to_json(v));
  j["artifacts"] = {{"series", m.series_path},
                    {"snapshots", m.snapshot_paths}};
  j["exit_code"] = m.exit_code;
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.scenario = j.at("scenario");
  m.config_hash = j.at("config_hash").get<std::string>();
  m.theory = theory_from_json(j.at("theory"));
  const auto& run = j.at("run");
  m.exit_event = exit_event_from_string(run.at("exit_event").get<std::string>());
  m.expected_exit_ok = run.at("expected_exit_ok").get<bool>();
  m.invariants_ok = run.at("invariants_ok").get<bool>();
  m.max_rel_mass_drift = num_from(run.at("max_rel_mass_drift"));
  m.min_u_seen = num_from(run.at("min_u_seen"));
  m.vstar_est = num_from(run.at("vstar_est"));
  m.dt_used = num_from(run.at("dt_used"));
  m.dt_halvings = run.at("dt_halvings").get<int>();
  m.steps = run.at("steps").get<std::int64_t>();
  m.final_t = num_from(run.at("final_t"));
  m.wall_ms = num_from(run.at("wall_ms"));
  m.fitted_rate = num_from(run.at("fitted_rate"));
  m.fit_r_squared = num_from(run.at("fit_r_squared"));
  m.max_v_growth = num_from(run.at("max_v_growth"));
  m.max_v_increasing = run.at("max_v_increasing").get<bool>();
  for (const auto& v : j.at("checks")) m.checks.push_back(verdict_from_json(v));
  m.series_path = j.at("artifacts").at("series").get<std::string>();
  for (const auto& p : j.at("artifacts").at("snapshots"))
    m.snapshot_paths.push_back(p.get<std::string>());
  m.exit_code = j.at("exit_code").get<int>();
  return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  atomic_write_text(path, manifest_to_json(m).dump(2) + "\n");
}

RunManifest load_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  return manifest_from_json(j);
}

}  // namespace kslab
