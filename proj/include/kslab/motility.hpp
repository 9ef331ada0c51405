#pragma once

#include <array>
#include <functional>
#include <string>

namespace kslab {

enum class MotilityKind { PowerLaw, Exponential, SqrtExp, LogPower, Custom };

const char* to_string(MotilityKind kind);

// Value and first two derivatives of the motility at one signal level.
struct MotilityTriple {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// Decreasing motility gamma(s). Built-in kinds carry closed-form derivatives
// and log-values; kinds singular at 0 clamp their argument at s_min instead
// of splicing in a regularized branch.
struct MotilitySpec {
  MotilityKind kind = MotilityKind::PowerLaw;
  double param = 1.0;  // k for PowerLaw/LogPower, chi for Exponential
  double s_min = 1e-8;
  std::function<double(double)> custom_value;
  std::function<double(double)> custom_d1;
  std::function<double(double)> custom_d2;

  static MotilitySpec power_law(double k);
  static MotilitySpec exponential(double chi);
  static MotilitySpec sqrt_exp();
  static MotilitySpec log_power(double k);
  static MotilitySpec custom(std::function<double(double)> value,
                             std::function<double(double)> d1,
                             std::function<double(double)> d2,
                             double s_min = 1e-8);
};

MotilityTriple gamma_eval(const MotilitySpec& spec, double s);
double gamma_value(const MotilitySpec& spec, double s);
// log(gamma(s)); exact formulas for built-in kinds, so it stays finite far
// past the underflow point of gamma itself.
double log_gamma_value(const MotilitySpec& spec, double s);
// gamma * gamma'' / gamma'^2 at one point, computed in a form that is stable
// for extreme s on the built-in kinds.
double l0_ratio(const MotilitySpec& spec, double s);

// Sampling certificate for one structural assumption on the motility.
struct AssumptionReport {
  std::string tag;
  bool holds = false;
  bool has_violation = false;
  double violation_s = 0.0;
  double violation_value = 0.0;
  std::array<double, 2> certified_range{0.0, 0.0};
  int samples = 0;
};

struct SampleRange {
  double lo = 0.5;
  double hi = 1e6;
};

// A0: gamma positive, nonincreasing, and trending to zero over the range.
AssumptionReport check_A0(const MotilitySpec& spec, SampleRange range = {},
                          int samples = 10000);
// A1: gamma(s) + s gamma'(s) >= -1e-12 at every sample.
AssumptionReport check_A1(const MotilitySpec& spec, SampleRange range = {},
                          int samples = 10000);
// A2 trend certificate for s^k gamma(s) -> infinity: log-space sequence
// strictly increasing over the last decade of the range with a nonvanishing
// gain. Certifies a trend, not a limit. The default range is deliberately
// huge; slowly divergent combinations only turn increasing far out.
AssumptionReport check_A2(const MotilitySpec& spec, double k,
                          SampleRange range = {0.5, 1e300},
                          int samples = 10000);
// Largest l0 with gamma gamma'' >= l0 gamma'^2 on the range: the infimum of
// l0_ratio over the samples. Returns +infinity when gamma' vanishes.
double a3_sup_l0(const MotilitySpec& spec, SampleRange range = {},
                 int samples = 10000);
// k admissible under A2 once A3 holds with l0 > 1.
double a3_implies_a2_k(double l0);

}  // namespace kslab
