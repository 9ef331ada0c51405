#include "kslab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kslab {

KInterval admissible_k_range(int n) {
  if (n < 2) throw std::invalid_argument("theory: admissible k table starts at n = 2");
  if (n == 2) return {0.0, std::numeric_limits<double>::infinity(), false};
  if (n == 3) return {0.0, 2.0, false};
  if (n <= 5) return {0.0, 1.0, true};
  return {0.0, 4.0 / (n - 2), false};
}

double critical_mass_2d(double chi) {
  if (!(chi > 0.0) || !std::isfinite(chi))
    throw std::invalid_argument("theory: chi must be positive");
  return 4.0 * std::numbers::pi / chi;
}

double predicted_decay_rate(double mu1, double gamma_at_vstar) {
  if (!(mu1 > 0.0) || !(gamma_at_vstar > 0.0))
    throw std::invalid_argument("theory: decay rate needs mu1 > 0 and gamma(v*) > 0");
  return mu1 * gamma_at_vstar / (1.0 + mu1);
}

Field pointwise_envelope(const Grid& grid, const Field& v0,
                         double gamma_at_vstar, double t) {
  grid.check_field(v0);
  if (!(gamma_at_vstar >= 0.0) || !(t >= 0.0))
    throw std::invalid_argument("theory: envelope needs gamma(v*) >= 0 and t >= 0");
  Field out = v0;
  const double factor = std::exp(gamma_at_vstar * t);
  for (auto& x : out.values) x *= factor;
  return out;
}

Field scaling_partner(const Trajectory& traj, double lambda, double k, double t,
                      const Grid& grid) {
  if (!(lambda > 0.0) || !(k > 0.0))
    throw std::invalid_argument("theory: scaling needs lambda > 0 and k > 0");
  if (traj.times.size() != traj.states.size() || traj.times.size() < 2)
    throw std::invalid_argument("theory: trajectory needs at least 2 snapshots");
  const double tau = std::pow(lambda, -k) * t;
  const double span = traj.times.back() - traj.times.front();
  const double slack = 1e-9 * std::max(span, 1.0);
  if (tau < traj.times.front() - slack || tau > traj.times.back() + slack)
    throw std::invalid_argument("theory: requested time lies beyond the stored trajectory");

  const double tc = std::clamp(tau, traj.times.front(), traj.times.back());
  auto it = std::upper_bound(traj.times.begin(), traj.times.end(), tc);
  std::size_t hi = std::min<std::size_t>(
      static_cast<std::size_t>(it - traj.times.begin()), traj.times.size() - 1);
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const double t0 = traj.times[lo];
  const double t1 = traj.times[hi];
  const double w = t1 > t0 ? (tc - t0) / (t1 - t0) : 0.0;

  grid.check_field(traj.states[lo]);
  Field out = grid.make_field();
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] =
        lambda * ((1.0 - w) * traj.states[lo].values[i] + w * traj.states[hi].values[i]);
  return out;
}

TheoryReport make_theory_report(const Grid& grid, const MotilitySpec& motility,
                                double vstar) {
  if (!(vstar > 0.0) || !std::isfinite(vstar))
    throw std::invalid_argument("theory: v* must be positive and finite");
  TheoryReport rep;
  rep.ambient_dim = grid.ambient_dim();
  rep.mu1 = neumann_mu1(grid);
  rep.vstar = vstar;
  rep.gamma_at_vstar = gamma_value(motility, vstar);
  rep.predicted_rate = predicted_decay_rate(rep.mu1, rep.gamma_at_vstar);
  rep.envelope_growth = rep.gamma_at_vstar;
  if (motility.kind == MotilityKind::PowerLaw) {
    rep.has_power_k = true;
    rep.power_k = motility.param;
    if (rep.ambient_dim >= 2) {
      rep.has_admissible_k = true;
      rep.admissible_k = admissible_k_range(rep.ambient_dim);
    }
  }
  if (motility.kind == MotilityKind::Exponential && rep.ambient_dim == 2) {
    rep.has_critical_mass = true;
    rep.critical_mass = critical_mass_2d(motility.param);
  }
  return rep;
}

}  // namespace kslab
