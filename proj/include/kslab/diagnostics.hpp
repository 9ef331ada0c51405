#pragma once

#include <array>
#include <vector>

#include "kslab/integrator.hpp"
#include "kslab/theory.hpp"

namespace kslab {

// One observation of a running simulation. The field order here is also the
// CSV column order.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double lyapunov_E = 0.0;
  double dissipation_D1 = 0.0;
  double dissipation_D2 = 0.0;
  double min_v = 0.0;
  double max_v = 0.0;
  double max_u = 0.0;
  double dist_u = 0.0;
  double dist_v_h1 = 0.0;
  double key_residual = 0.0;
  double envelope_margin = 0.0;
};

inline constexpr std::array<const char*, 12> kDiagnosticsColumns = {
    "t",      "mass",  "lyapunov_E", "dissipation_D1", "dissipation_D2",
    "min_v",  "max_v", "max_u",      "dist_u",         "dist_v_h1",
    "key_residual", "envelope_margin"};

// Run-level context the per-step observation needs: the conserved mean, the
// initial signal for the exponential barrier, and the running signal minimum
// the barrier's growth rate is evaluated at.
struct RecordContext {
  double ubar0 = 0.0;
  const Field* v0 = nullptr;
  double vstar_est = 0.0;
};

// E = (|grad v|^2 + |v|^2)/2; D1 = int gamma(v) (Lap v)^2. D2 is the face
// form <grad v, grad(v gamma(v))>: under the sign condition
// gamma + s gamma' >= 0 each face term is nonnegative, and the semidiscrete
// balance dE/dt + D1 + D2 = 0 holds exactly, so the recorded residual is pure
// time-discretization error.
DiagnosticsRecord record(const SimState& prev, const SimState& cur,
                         const MotilitySpec& motility,
                         const HelmholtzSolver& solver, const Grid& grid,
                         const RecordContext& ctx);

struct LyapunovAudit {
  bool monotone = false;
  double max_increase = 0.0;  // largest E_{j+1} - E_j over the series
  double tol_E = 0.0;
  double mean_identity_residual = 0.0;
  double max_identity_residual = 0.0;
};

// Monotonicity within the scheme tolerance 10 * dt * max(D1+D2) * eps, plus
// the discrete-identity residual |dE/dt + D1 + D2| averaged over the series.
LyapunovAudit lyapunov_audit(const std::vector<DiagnosticsRecord>& series,
                             double dt, double eps_scheme = 0.1);

struct DecayFit {
  double rate = 0.0;  // slope of log y vs t (negative for decay)
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

// Log-linear least squares over the trailing window_fraction of the samples.
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y,
                        double window_fraction = 0.5);

struct RateCheckResult {
  bool applicable = false;  // false when the series is not decaying
  bool pass = false;
  double fitted = 0.0;
  double predicted = 0.0;
  double r_squared = 0.0;
};

// Fitted |slope| of dist_v_h1 must reach (1 - delta) of the predicted rate.
RateCheckResult rate_check(const std::vector<DiagnosticsRecord>& series,
                           const TheoryReport& theory, double delta = 0.15,
                           double window_fraction = 0.5);

}  // namespace kslab
