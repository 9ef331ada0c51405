#include "kslab/integrator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kslab/errors.hpp"

namespace kslab {

const char* to_string(ExitEvent e) {
  switch (e) {
    case ExitEvent::Completed: return "completed";
    case ExitEvent::Converged: return "converged";
    case ExitEvent::ThresholdExceeded: return "threshold_exceeded";
  }
  return "unknown";
}

Stepper::Stepper(const Grid& grid, const MotilitySpec& motility,
                 const HelmholtzSolver& helmholtz)
    : grid_(grid), motility_(motility), helmholtz_(helmholtz) {
  if (helmholtz.grid().id() != grid.id())
    throw std::invalid_argument("stepper: signal solver built on a different grid");
  lap_ = grid.op_matrix();
  lap_.makeCompressed();

  // The system matrix I - dt L diag(gamma) shares the Laplacian pattern plus
  // a full diagonal; pre-insert the diagonal so only values change per step.
  system_ = lap_;
  const auto n = static_cast<Eigen::Index>(grid.cell_count());
  Eigen::SparseMatrix<double> eye(n, n);
  eye.setIdentity();
  system_ += eye;
  system_.makeCompressed();
}

SimState Stepper::initial_state(const Field& u0) const {
  grid_.check_field(u0);
  bool nonzero = false;
  for (double x : u0.values) {
    if (!std::isfinite(x) || x < 0.0)
      throw std::invalid_argument("integrator: initial density must be finite and nonnegative");
    if (x > 0.0) nonzero = true;
  }
  if (!nonzero)
    throw std::invalid_argument("integrator: initial density must not vanish identically");
  SimState s;
  s.u = u0;
  s.v = helmholtz_.solve(u0);
  s.t = 0.0;
  s.step = 0;
  return s;
}

SimState Stepper::step(const SimState& state, double dt) {
  grid_.check_field(state.u);
  grid_.check_field(state.v);
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("integrator: dt must be positive and finite");

  const auto n = static_cast<Eigen::Index>(grid_.cell_count());
  std::vector<double> gamma(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < gamma.size(); ++i)
    gamma[i] = gamma_value(motility_, state.v.values[i]);

  // Fill I - dt L diag(gamma) column by column (CSC: column j scales by
  // gamma_j), reusing the analyzed pattern.
  {
    const auto* outerL = lap_.outerIndexPtr();
    const auto* innerL = lap_.innerIndexPtr();
    const double* lval = lap_.valuePtr();
    const auto* outerS = system_.outerIndexPtr();
    const auto* innerS = system_.innerIndexPtr();
    double* sval = system_.valuePtr();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double scale = -dt * gamma[static_cast<std::size_t>(j)];
      Eigen::Index pl = outerL[j];
      for (Eigen::Index p = outerS[j]; p < outerS[j + 1]; ++p) {
        double v = (innerS[p] == j) ? 1.0 : 0.0;
        if (pl < outerL[j + 1] && innerL[pl] == innerS[p]) {
          v += scale * lval[pl];
          ++pl;
        }
        sval[p] = v;
      }
    }
  }

  if (!pattern_analyzed_) {
    lu_.analyzePattern(system_);
    pattern_analyzed_ = true;
  }
  lu_.factorize(system_);
  if (lu_.info() != Eigen::Success)
    throw SolverError("integrator: transport factorization failed at step " +
                          std::to_string(state.step + 1),
                      0.0);

  Eigen::Map<const Eigen::VectorXd> rhs(state.u.values.data(), n);
  Eigen::VectorXd ustar = lu_.solve(rhs);

  // Defect check on the linear solve itself.
  const double rres = (system_ * ustar - rhs).norm() /
                      std::max(rhs.norm(), 1e-300);
  if (!(rres < 1e-8))
    throw SolverError("integrator: transport solve residual too large at step " +
                          std::to_string(state.step + 1),
                      rres);

  // Conservative update: u^{n+1} = u^n + dt div(grad(gamma u*)) evaluated in
  // flux form, so mass telescopes across faces exactly.
  Field w = grid_.make_field();
  for (std::size_t i = 0; i < w.values.size(); ++i)
    w.values[i] = gamma[i] * ustar[static_cast<Eigen::Index>(i)];
  Field lw = grid_.laplacian(w);

  SimState next;
  next.u = grid_.make_field();
  for (std::size_t i = 0; i < next.u.values.size(); ++i) {
    const double x = state.u.values[i] + dt * lw.values[i];
    if (!std::isfinite(x))
      throw SolverError("integrator: non-finite density at step " +
                            std::to_string(state.step + 1),
                        0.0);
    next.u.values[i] = x;
  }
  next.v = helmholtz_.solve(next.u);
  next.t = state.t + dt;
  next.step = state.step + 1;
  return next;
}

double key_identity_residual(const SimState& prev, const SimState& cur,
                             const MotilitySpec& motility,
                             const HelmholtzSolver& helmholtz, const Grid& grid) {
  grid.check_field(prev.v);
  grid.check_field(cur.v);
  if (cur.t == prev.t) return 0.0;
  const double dt = cur.t - prev.t;
  if (!(dt > 0.0))
    throw std::invalid_argument("integrator: states out of order in residual");

  Field w = grid.make_field();
  for (std::size_t i = 0; i < w.values.size(); ++i)
    w.values[i] = gamma_value(motility, cur.v.values[i]) * cur.u.values[i];
  Field hw = helmholtz.solve(w);

  double r = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const double x =
        (cur.v.values[i] - prev.v.values[i]) / dt + w.values[i] - hw.values[i];
    r = std::max(r, std::abs(x));
  }
  return r;
}

double Stepper::key_identity_residual(const SimState& prev, const SimState& cur) const {
  return kslab::key_identity_residual(prev, cur, motility_, helmholtz_, grid_);
}

}  // namespace kslab
