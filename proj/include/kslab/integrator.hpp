#pragma once

#include <Eigen/SparseLU>
#include <cstdint>
#include <vector>

#include "kslab/elliptic.hpp"
#include "kslab/grid.hpp"
#include "kslab/motility.hpp"

namespace kslab {

struct SimState {
  Field u;
  Field v;
  double t = 0.0;
  std::int64_t step = 0;
};

struct SimConfig {
  double dt = 0.0;  // 0 selects 0.25 h^2 / gamma(min v0)
  double t_end = 1.0;
  double convergence_tol = 1e-6;  // 0 disables the convergence exit
  double blowup_threshold = 1e9;
  int output_every = 1;
  std::uint64_t seed = 0;
  double residual_bound = 0.0;  // >0 retries a step at dt/2 when exceeded
  int max_dt_halvings = 12;
};

enum class ExitEvent { Completed, Converged, ThresholdExceeded };

const char* to_string(ExitEvent e);

// sup-norm of (v1 - v0)/dt + gamma(v1) u1 - (I - Lap)^{-1}[gamma(v1) u1];
// zero at equilibrium, O(dt) along trajectories.
double key_identity_residual(const SimState& prev, const SimState& cur,
                             const MotilitySpec& motility,
                             const HelmholtzSolver& helmholtz, const Grid& grid);

// Backward-Euler transport step with the motility frozen at the current
// signal: solve (I - dt L diag(gamma)) u* = u, then re-evaluate the update in
// face-flux form so the volume-weighted mass telescopes exactly, and finally
// refresh the signal. The system matrix is an M-matrix, which preserves
// positivity without any clipping.
class Stepper {
 public:
  Stepper(const Grid& grid, const MotilitySpec& motility,
          const HelmholtzSolver& helmholtz);

  SimState initial_state(const Field& u0) const;
  SimState step(const SimState& state, double dt);

  // sup-norm of (v1 - v0)/dt + gamma(v1) u1 - (I - Lap)^{-1}[gamma(v1) u1];
  // zero at equilibrium, O(dt) along trajectories.
  double key_identity_residual(const SimState& prev, const SimState& cur) const;

  const Grid& grid() const { return grid_; }
  const MotilitySpec& motility() const { return motility_; }
  const HelmholtzSolver& helmholtz() const { return helmholtz_; }

 private:
  const Grid& grid_;
  MotilitySpec motility_;
  const HelmholtzSolver& helmholtz_;
  Eigen::SparseMatrix<double> lap_;     // plain operator, compressed
  Eigen::SparseMatrix<double> system_;  // same pattern plus diagonal, refilled per step
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool pattern_analyzed_ = false;
};

struct RunOptions {
  bool store_trajectory = false;
  int trajectory_every = 1;  // in steps
};

struct TrajectorySnapshot {
  double t;
  Field u;
};

}  // namespace kslab
