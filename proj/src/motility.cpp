#include "kslab/motility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kslab {

const char* to_string(MotilityKind kind) {
  switch (kind) {
    case MotilityKind::PowerLaw: return "power_law";
    case MotilityKind::Exponential: return "exponential";
    case MotilityKind::SqrtExp: return "sqrt_exp";
    case MotilityKind::LogPower: return "log_power";
    case MotilityKind::Custom: return "custom";
  }
  return "unknown";
}

namespace {

bool clamps_at_zero(MotilityKind kind) {
  // Exponential is the only built-in kind regular at s = 0.
  return kind != MotilityKind::Exponential;
}

double effective_s(const MotilitySpec& spec, double s) {
  if (!(s >= 0.0))
    throw std::invalid_argument("motility: argument must be nonnegative");
  if (clamps_at_zero(spec.kind) && s < spec.s_min) return spec.s_min;
  return s;
}

void validate_common(const MotilitySpec& spec) {
  if (!(spec.s_min > 0.0) || !std::isfinite(spec.s_min))
    throw std::invalid_argument("motility: s_min must be positive and finite");
}

std::vector<double> log_samples(SampleRange range, int m) {
  if (!(range.lo > 0.0) || !(range.hi > range.lo) || !std::isfinite(range.lo))
    throw std::invalid_argument("motility: sample range must satisfy 0 < lo < hi");
  if (m < 3) throw std::invalid_argument("motility: need at least 3 samples");
  std::vector<double> s(static_cast<std::size_t>(m));
  const double llo = std::log(range.lo);
  const double lhi = std::log(range.hi);
  for (int j = 0; j < m; ++j)
    s[static_cast<std::size_t>(j)] = std::exp(llo + (lhi - llo) * j / (m - 1));
  s.front() = range.lo;
  s.back() = range.hi;
  return s;
}

}  // namespace

MotilitySpec MotilitySpec::power_law(double k) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw std::invalid_argument("motility: power-law exponent must be positive");
  MotilitySpec spec;
  spec.kind = MotilityKind::PowerLaw;
  spec.param = k;
  validate_common(spec);
  return spec;
}

MotilitySpec MotilitySpec::exponential(double chi) {
  if (!(chi > 0.0) || !std::isfinite(chi))
    throw std::invalid_argument("motility: exponential rate must be positive");
  MotilitySpec spec;
  spec.kind = MotilityKind::Exponential;
  spec.param = chi;
  validate_common(spec);
  return spec;
}

MotilitySpec MotilitySpec::sqrt_exp() {
  MotilitySpec spec;
  spec.kind = MotilityKind::SqrtExp;
  spec.param = 0.0;
  validate_common(spec);
  return spec;
}

MotilitySpec MotilitySpec::log_power(double k) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw std::invalid_argument("motility: log-power exponent must be positive");
  MotilitySpec spec;
  spec.kind = MotilityKind::LogPower;
  spec.param = k;
  validate_common(spec);
  return spec;
}

MotilitySpec MotilitySpec::custom(std::function<double(double)> value,
                                  std::function<double(double)> d1,
                                  std::function<double(double)> d2,
                                  double s_min) {
  if (!value || !d1 || !d2)
    throw std::invalid_argument("motility: custom spec needs all three callables");
  MotilitySpec spec;
  spec.kind = MotilityKind::Custom;
  spec.s_min = s_min;
  spec.custom_value = std::move(value);
  spec.custom_d1 = std::move(d1);
  spec.custom_d2 = std::move(d2);
  validate_common(spec);
  return spec;
}

MotilityTriple gamma_eval(const MotilitySpec& spec, double s) {
  const double x = effective_s(spec, s);
  MotilityTriple t;
  switch (spec.kind) {
    case MotilityKind::PowerLaw: {
      const double k = spec.param;
      t.value = std::pow(x, -k);
      t.d1 = -k * std::pow(x, -k - 1.0);
      t.d2 = k * (k + 1.0) * std::pow(x, -k - 2.0);
      break;
    }
    case MotilityKind::Exponential: {
      const double chi = spec.param;
      t.value = std::exp(-chi * x);
      t.d1 = -chi * t.value;
      t.d2 = chi * chi * t.value;
      break;
    }
    case MotilityKind::SqrtExp: {
      const double r = std::sqrt(x);
      t.value = std::exp(-r);
      t.d1 = -t.value / (2.0 * r);
      t.d2 = t.value * (1.0 / (4.0 * x) + 1.0 / (4.0 * x * r));
      break;
    }
    case MotilityKind::LogPower: {
      const double k = spec.param;
      const double l = std::log1p(x);
      const double q = x / ((1.0 + x) * l);
      const double base = std::pow(x, -k) / l;
      t.value = base;
      t.d1 = -(base / x) * (k + q);
      t.d2 = (base / (x * x)) * (k * (k + 1.0) + 2.0 * k * q + q * q * (2.0 + l));
      break;
    }
    case MotilityKind::Custom: {
      t.value = spec.custom_value(x);
      t.d1 = spec.custom_d1(x);
      t.d2 = spec.custom_d2(x);
      if (!std::isfinite(t.value) || !std::isfinite(t.d1) || !std::isfinite(t.d2))
        throw std::domain_error("motility: custom callable returned a non-finite value");
      break;
    }
  }
  return t;
}

double gamma_value(const MotilitySpec& spec, double s) {
  return gamma_eval(spec, s).value;
}

double log_gamma_value(const MotilitySpec& spec, double s) {
  const double x = effective_s(spec, s);
  switch (spec.kind) {
    case MotilityKind::PowerLaw:
      return -spec.param * std::log(x);
    case MotilityKind::Exponential:
      return -spec.param * x;
    case MotilityKind::SqrtExp:
      return -std::sqrt(x);
    case MotilityKind::LogPower:
      return -spec.param * std::log(x) - std::log(std::log1p(x));
    case MotilityKind::Custom:
      return std::log(spec.custom_value(x));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double l0_ratio(const MotilitySpec& spec, double s) {
  const double x = effective_s(spec, s);
  switch (spec.kind) {
    case MotilityKind::PowerLaw:
      return (spec.param + 1.0) / spec.param;
    case MotilityKind::Exponential:
      return 1.0;
    case MotilityKind::SqrtExp:
      return 1.0 + 1.0 / std::sqrt(x);
    case MotilityKind::LogPower: {
      const double k = spec.param;
      const double l = std::log1p(x);
      const double q = x / ((1.0 + x) * l);
      const double a = k + q;
      return (k * (k + 1.0) + 2.0 * k * q + q * q * (2.0 + l)) / (a * a);
    }
    case MotilityKind::Custom: {
      MotilityTriple t = gamma_eval(spec, x);
      if (t.d1 == 0.0) return std::numeric_limits<double>::infinity();
      return t.value * t.d2 / (t.d1 * t.d1);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

AssumptionReport check_A0(const MotilitySpec& spec, SampleRange range, int samples) {
  auto s = log_samples(range, samples);
  AssumptionReport rep;
  rep.tag = "A0";
  rep.samples = samples;
  rep.certified_range = {effective_s(spec, s.front()), s.back()};
  rep.holds = true;
  for (double si : s) {
    MotilityTriple t = gamma_eval(spec, si);
    const bool positive = spec.kind == MotilityKind::Custom
                              ? t.value > 0.0
                              : std::isfinite(log_gamma_value(spec, si));
    if (!positive || t.d1 > 1e-12) {
      rep.holds = false;
      rep.has_violation = true;
      rep.violation_s = si;
      rep.violation_value = positive ? t.d1 : t.value;
      return rep;
    }
  }
  // Vanishing-at-infinity trend: gamma must at least halve across the range.
  const double drop = log_gamma_value(spec, s.back()) - log_gamma_value(spec, s.front());
  if (!(drop <= std::log(0.5))) {
    rep.holds = false;
    rep.has_violation = true;
    rep.violation_s = s.back();
    rep.violation_value = drop;
  }
  return rep;
}

AssumptionReport check_A1(const MotilitySpec& spec, SampleRange range, int samples) {
  auto s = log_samples(range, samples);
  AssumptionReport rep;
  rep.tag = "A1";
  rep.samples = samples;
  rep.certified_range = {effective_s(spec, s.front()), s.back()};
  rep.holds = true;
  for (double si : s) {
    const double x = effective_s(spec, si);
    MotilityTriple t = gamma_eval(spec, x);
    const double val = t.value + x * t.d1;
    if (!(val >= -1e-12)) {
      rep.holds = false;
      rep.has_violation = true;
      rep.violation_s = x;
      rep.violation_value = val;
      return rep;
    }
  }
  return rep;
}

AssumptionReport check_A2(const MotilitySpec& spec, double k, SampleRange range,
                          int samples) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw std::invalid_argument("motility: A2 test exponent must be positive");
  auto s = log_samples(range, samples);
  AssumptionReport rep;
  rep.tag = "A2";
  rep.samples = samples;
  rep.certified_range = {effective_s(spec, s.front()), s.back()};

  // Trend of log(s^k gamma(s)) over the last decade of the range.
  std::vector<std::size_t> window;
  for (std::size_t j = 0; j < s.size(); ++j)
    if (s[j] >= range.hi / 10.0) window.push_back(j);
  if (window.size() < 3)
    throw std::invalid_argument("motility: A2 needs at least 3 samples in the last decade");

  auto g = [&](double si) { return k * std::log(si) + log_gamma_value(spec, si); };
  rep.holds = true;
  double prev = g(s[window.front()]);
  if (!std::isfinite(prev)) {
    rep.holds = false;
    rep.has_violation = true;
    rep.violation_s = s[window.front()];
    rep.violation_value = prev;
    return rep;
  }
  for (std::size_t w = 1; w < window.size(); ++w) {
    const double cur = g(s[window[w]]);
    if (!std::isfinite(cur) || !(cur > prev)) {
      rep.holds = false;
      rep.has_violation = true;
      rep.violation_s = s[window[w]];
      rep.violation_value = cur - prev;
      return rep;
    }
    prev = cur;
  }
  const double gain = prev - g(s[window.front()]);
  if (!(gain >= 1e-6)) {
    rep.holds = false;
    rep.has_violation = true;
    rep.violation_s = s.back();
    rep.violation_value = gain;
  }
  return rep;
}

double a3_sup_l0(const MotilitySpec& spec, SampleRange range, int samples) {
  auto s = log_samples(range, samples);
  double inf_ratio = std::numeric_limits<double>::infinity();
  for (double si : s) {
    const double r = l0_ratio(spec, si);
    if (std::isinf(r)) return r;
    if (!std::isfinite(r))
      throw std::domain_error("motility: A3 ratio is undefined on the range");
    inf_ratio = std::min(inf_ratio, r);
  }
  return inf_ratio;
}

double a3_implies_a2_k(double l0) {
  if (!(l0 > 1.0) || !std::isfinite(l0))
    throw std::invalid_argument("motility: need finite l0 > 1");
  return 1.0 / (l0 - 1.0);
}

}  // namespace kslab
