#pragma once

#include <vector>

#include "kslab/diagnostics.hpp"
#include "kslab/integrator.hpp"

namespace kslab {

struct RunResult {
  SimState final_state;
  std::vector<DiagnosticsRecord> series;
  ExitEvent exit_event = ExitEvent::Completed;
  double vstar_est = 0.0;           // running min of v over all steps
  double max_rel_mass_drift = 0.0;  // max |m(t) - m(0)| / m(0)
  double min_u_seen = 0.0;
  double dt_used = 0.0;             // dt of the accepted steps (after halvings)
  int dt_halvings = 0;
  std::vector<TrajectorySnapshot> trajectory;  // empty unless requested
};

// Steps u_t = Lap(gamma(v) u), v = (I - Lap)^{-1} u from u0 until t_end,
// convergence, or the density threshold. Records diagnostics at t = 0, every
// output_every steps, and at exit.
RunResult run_simulation(const Field& u0, const SimConfig& config,
                         const MotilitySpec& motility, const Grid& grid,
                         const HelmholtzSolver& helmholtz,
                         const RunOptions& options = {});

}  // namespace kslab
