#include "kslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kslab {

DiagnosticsRecord record(const SimState& prev, const SimState& cur,
                         const MotilitySpec& motility,
                         const HelmholtzSolver& solver, const Grid& grid,
                         const RecordContext& ctx) {
  grid.check_field(cur.u);
  grid.check_field(cur.v);
  if (ctx.v0 == nullptr) throw std::invalid_argument("diagnostics: context needs v0");
  grid.check_field(*ctx.v0);

  DiagnosticsRecord r;
  r.t = cur.t;
  r.mass = grid.integrate(cur.u);

  const double vv = grid.inner(cur.v, cur.v);
  const double gv = grid.grad_sq_norm(cur.v);
  r.lyapunov_E = 0.5 * (gv + vv);

  Field lv = grid.laplacian(cur.v);
  Field phi = grid.make_field();  // s gamma(s) at the signal level
  double d1 = 0.0;
  for (std::size_t i = 0; i < cur.v.values.size(); ++i) {
    const double s = cur.v.values[i];
    const double g = gamma_value(motility, s);
    d1 += grid.cell_volumes()[i] * g * lv.values[i] * lv.values[i];
    phi.values[i] = s * g;
  }
  r.dissipation_D1 = d1;
  r.dissipation_D2 = grid.dirichlet_form(cur.v, phi);

  double min_v = cur.v.values[0], max_v = cur.v.values[0], max_u = 0.0,
         dist_u = 0.0;
  for (std::size_t i = 0; i < cur.v.values.size(); ++i) {
    min_v = std::min(min_v, cur.v.values[i]);
    max_v = std::max(max_v, cur.v.values[i]);
    max_u = std::max(max_u, cur.u.values[i]);
    dist_u = std::max(dist_u, std::abs(cur.u.values[i] - ctx.ubar0));
  }
  r.min_v = min_v;
  r.max_v = max_v;
  r.max_u = max_u;
  r.dist_u = dist_u;

  double dev = 0.0;
  for (std::size_t i = 0; i < cur.v.values.size(); ++i) {
    const double d = cur.v.values[i] - ctx.ubar0;
    dev += grid.cell_volumes()[i] * d * d;
  }
  r.dist_v_h1 = std::sqrt(gv + dev);

  r.key_residual = key_identity_residual(prev, cur, motility, solver, grid);

  const double growth = std::exp(gamma_value(motility, ctx.vstar_est) * cur.t);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cur.v.values.size(); ++i)
    margin = std::min(margin, ctx.v0->values[i] * growth - cur.v.values[i]);
  r.envelope_margin = margin;
  return r;
}

LyapunovAudit lyapunov_audit(const std::vector<DiagnosticsRecord>& series,
                             double dt, double eps_scheme) {
  if (series.size() < 2)
    throw std::invalid_argument("diagnostics: audit needs at least 2 records");
  if (!(dt > 0.0)) throw std::invalid_argument("diagnostics: audit needs dt > 0");

  LyapunovAudit a;
  double dmax = 0.0;
  for (const auto& r : series)
    dmax = std::max(dmax, r.dissipation_D1 + r.dissipation_D2);
  a.tol_E = 10.0 * dt * dmax * eps_scheme;

  double max_inc = -std::numeric_limits<double>::infinity();
  double rsum = 0.0, rmax = 0.0;
  for (std::size_t j = 0; j + 1 < series.size(); ++j) {
    const auto& r0 = series[j];
    const auto& r1 = series[j + 1];
    max_inc = std::max(max_inc, r1.lyapunov_E - r0.lyapunov_E);
    const double span = r1.t - r0.t;
    if (!(span > 0.0))
      throw std::invalid_argument("diagnostics: records out of order");
    const double diss = 0.5 * (r0.dissipation_D1 + r0.dissipation_D2 +
                               r1.dissipation_D1 + r1.dissipation_D2);
    const double res = std::abs((r1.lyapunov_E - r0.lyapunov_E) / span + diss);
    rsum += res;
    rmax = std::max(rmax, res);
  }
  a.max_increase = max_inc;
  a.monotone = max_inc <= a.tol_E;
  a.mean_identity_residual = rsum / static_cast<double>(series.size() - 1);
  a.max_identity_residual = rmax;
  return a;
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y,
                        double window_fraction) {
  if (t.size() != y.size())
    throw std::invalid_argument("diagnostics: fit needs matching t and y");
  if (!(window_fraction > 0.0) || window_fraction > 1.0)
    throw std::invalid_argument("diagnostics: window fraction must be in (0, 1]");
  const std::size_t n = t.size();
  std::size_t m = static_cast<std::size_t>(
      std::ceil(window_fraction * static_cast<double>(n)));
  m = std::max<std::size_t>(m, 3);
  if (n < 3 || m > n)
    throw std::invalid_argument("diagnostics: fit needs at least 3 samples");
  const std::size_t begin = n - m;

  double st = 0.0, sv = 0.0, stt = 0.0, stv = 0.0;
  for (std::size_t i = begin; i < n; ++i) {
    if (!(y[i] > 0.0))
      throw std::invalid_argument("diagnostics: fit needs positive samples");
    const double ly = std::log(y[i]);
    st += t[i];
    sv += ly;
    stt += t[i] * t[i];
    stv += t[i] * ly;
  }
  const double dm = static_cast<double>(m);
  const double det = dm * stt - st * st;
  if (det == 0.0)
    throw std::invalid_argument("diagnostics: degenerate time samples in fit");

  DecayFit fit;
  fit.points = static_cast<int>(m);
  fit.rate = (dm * stv - st * sv) / det;
  fit.intercept = (sv - fit.rate * st) / dm;

  double ss_res = 0.0, ss_tot = 0.0;
  const double mean = sv / dm;
  for (std::size_t i = begin; i < n; ++i) {
    const double ly = std::log(y[i]);
    const double pred = fit.intercept + fit.rate * t[i];
    ss_res += (ly - pred) * (ly - pred);
    ss_tot += (ly - mean) * (ly - mean);
  }
  fit.r_squared = ss_tot <= 1e-30 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

RateCheckResult rate_check(const std::vector<DiagnosticsRecord>& series,
                           const TheoryReport& theory, double delta,
                           double window_fraction) {
  RateCheckResult res;
  res.predicted = theory.predicted_rate;
  if (series.size() < 3) return res;  // too short to fit: flagged, not failed

  std::vector<double> t, y;
  t.reserve(series.size());
  y.reserve(series.size());
  for (const auto& r : series) {
    t.push_back(r.t);
    y.push_back(r.dist_v_h1);
  }
  for (double yi : y)
    if (!(yi > 0.0)) return res;  // flagged, not failed

  DecayFit fit = fit_decay_rate(t, y, window_fraction);
  res.fitted = fit.rate;
  res.r_squared = fit.r_squared;
  if (fit.rate >= 0.0) return res;  // not decaying: flagged
  res.applicable = true;
  res.pass = std::abs(fit.rate) >= (1.0 - delta) * theory.predicted_rate;
  return res;
}

}  // namespace kslab
