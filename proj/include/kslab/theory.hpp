#pragma once

#include <limits>
#include <vector>

#include "kslab/field.hpp"
#include "kslab/grid.hpp"
#include "kslab/motility.hpp"

namespace kslab {

// Admissible power-law exponent band (lo, hi]; lo is always 0 and exclusive.
struct KInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool hi_inclusive = false;
  bool contains(double k) const {
    return k > lo && (hi_inclusive ? k <= hi : k < hi);
  }
};

// Exponent band for global boundedness of power-law runs in dimension n >= 2.
KInterval admissible_k_range(int n);

// Mass threshold 4*pi/chi separating bounded from unbounded behaviour for
// exponential motility in two dimensions.
double critical_mass_2d(double chi);

// Linear lower bound mu1 * gamma(v*) / (1 + mu1) for the exponential decay of
// the signal toward its mean.
double predicted_decay_rate(double mu1, double gamma_at_vstar);

// Upper barrier v0 * exp(gamma(v*) t) that the signal can never cross.
Field pointwise_envelope(const Grid& grid, const Field& v0,
                         double gamma_at_vstar, double t);

// Time-stamped snapshots of one run, for the rescaling comparison.
struct Trajectory {
  std::vector<double> times;
  std::vector<Field> states;
};

// The rescaled solution lambda * u(lambda^{-k} t, x) sampled at time t,
// with linear interpolation between stored snapshots.
Field scaling_partner(const Trajectory& traj, double lambda, double k, double t,
                      const Grid& grid);

struct TheoryReport {
  int ambient_dim = 0;
  double mu1 = 0.0;
  double vstar = 0.0;
  double gamma_at_vstar = 0.0;
  double predicted_rate = 0.0;
  double envelope_growth = 0.0;
  bool has_admissible_k = false;
  KInterval admissible_k;
  bool has_power_k = false;
  double power_k = std::numeric_limits<double>::quiet_NaN();
  bool has_critical_mass = false;
  double critical_mass = std::numeric_limits<double>::quiet_NaN();
};

// Bundles every prediction that applies to a (grid, motility, v*) triple.
TheoryReport make_theory_report(const Grid& grid, const MotilitySpec& motility,
                                double vstar);

}  // namespace kslab
