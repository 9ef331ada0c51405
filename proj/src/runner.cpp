#include "kslab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

double field_min(const Field& f) {
  double m = f.values[0];
  for (double x : f.values) m = std::min(m, x);
  return m;
}

double field_max(const Field& f) {
  double m = f.values[0];
  for (double x : f.values) m = std::max(m, x);
  return m;
}

}  // namespace

RunResult run_simulation(const Field& u0, const SimConfig& config,
                         const MotilitySpec& motility, const Grid& grid,
                         const HelmholtzSolver& helmholtz,
                         const RunOptions& options) {
  if (!(config.t_end > 0.0) || !std::isfinite(config.t_end))
    throw std::invalid_argument("runner: t_end must be positive and finite");
  if (config.dt < 0.0 || !std::isfinite(config.dt))
    throw std::invalid_argument("runner: dt must be nonnegative and finite");
  if (config.convergence_tol < 0.0)
    throw std::invalid_argument("runner: convergence_tol must be nonnegative");
  if (!(config.blowup_threshold > 0.0) || !std::isfinite(config.blowup_threshold))
    throw std::invalid_argument("runner: blowup_threshold must be positive and finite");
  if (config.output_every < 1)
    throw std::invalid_argument("runner: output_every must be at least 1");
  if (config.residual_bound < 0.0)
    throw std::invalid_argument("runner: residual_bound must be nonnegative");
  if (config.max_dt_halvings < 0)
    throw std::invalid_argument("runner: max_dt_halvings must be nonnegative");
  if (options.trajectory_every < 1)
    throw std::invalid_argument("runner: trajectory_every must be at least 1");

  Stepper stepper(grid, motility, helmholtz);
  SimState state = stepper.initial_state(u0);

  if (!(config.blowup_threshold > field_max(state.u)))
    throw std::invalid_argument(
        "runner: blowup_threshold must exceed the initial density sup");

  const double mass0 = grid.integrate(state.u);
  const double ubar0 = mass0 / grid.domain_volume();

  RunResult res;
  res.min_u_seen = field_min(state.u);
  res.vstar_est = field_min(state.v);

  double dt = config.dt;
  if (dt == 0.0) {
    const double h = grid.min_spacing();
    dt = 0.25 * h * h / gamma_value(motility, res.vstar_est);
  }

  const Field v0 = state.v;
  RecordContext ctx;
  ctx.ubar0 = ubar0;
  ctx.v0 = &v0;
  ctx.vstar_est = res.vstar_est;

  res.series.push_back(record(state, state, motility, helmholtz, grid, ctx));
  if (options.store_trajectory) res.trajectory.push_back({state.t, state.u});

  const double horizon = config.t_end * (1.0 - 1e-12);
  int halvings = 0;
  res.exit_event = ExitEvent::Completed;

  while (state.t < horizon) {
    SimState next;
    for (;;) {
      const double remaining = config.t_end - state.t;
      const double step_dt = (remaining <= dt * (1.0 + 1e-9)) ? remaining : dt;
      next = stepper.step(state, step_dt);
      if (config.residual_bound <= 0.0) break;
      const double kr = stepper.key_identity_residual(state, next);
      if (kr <= config.residual_bound) break;
      if (halvings >= config.max_dt_halvings)
        throw SolverError("runner: key-identity residual stayed above " +
                              std::to_string(config.residual_bound) + " after " +
                              std::to_string(halvings) + " dt halvings",
                          kr);
      dt *= 0.5;
      ++halvings;
    }

    const SimState prior = std::move(state);
    state = std::move(next);

    res.min_u_seen = std::min(res.min_u_seen, field_min(state.u));
    res.vstar_est = std::min(res.vstar_est, field_min(state.v));
    ctx.vstar_est = res.vstar_est;
    res.max_rel_mass_drift =
        std::max(res.max_rel_mass_drift,
                 std::abs(grid.integrate(state.u) - mass0) / mass0);

    double dist_u = 0.0;
    for (double x : state.u.values)
      dist_u = std::max(dist_u, std::abs(x - ubar0));

    const bool threshold = field_max(state.u) >= config.blowup_threshold;
    const bool converged =
        config.convergence_tol > 0.0 && dist_u < config.convergence_tol;
    const bool completed = !(state.t < horizon);
    const bool exiting = threshold || converged || completed;
    const bool record_now =
        exiting || state.step % config.output_every == 0;

    if (record_now)
      res.series.push_back(record(prior, state, motility, helmholtz, grid, ctx));
    if (options.store_trajectory &&
        (exiting || state.step % options.trajectory_every == 0))
      res.trajectory.push_back({state.t, state.u});

    if (threshold) {
      res.exit_event = ExitEvent::ThresholdExceeded;
      break;
    }
    if (converged) {
      res.exit_event = ExitEvent::Converged;
      break;
    }
    if (completed) {
      res.exit_event = ExitEvent::Completed;
      break;
    }
  }

  res.dt_used = dt;
  res.dt_halvings = halvings;
  res.final_state = std::move(state);
  return res;
}

}  // namespace kslab
