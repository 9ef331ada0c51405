#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "kslab/motility.hpp"

using namespace kslab;

namespace {

// Centered finite differences with a step tied to the local logarithmic scale
// of gamma, so every built-in kind is probed in its own natural units.
void check_derivatives(const MotilitySpec& spec, double lo, double hi, int n) {
  for (int j = 0; j < n; ++j) {
    const double s = lo * std::pow(hi / lo, (j + 0.5) / n);
    MotilityTriple t = gamma_eval(spec, s);
    const double scale = std::min(s, std::abs(t.value / t.d1));
    const double h = 1e-6 * scale;
    const double fd1 =
        (gamma_eval(spec, s + h).value - gamma_eval(spec, s - h).value) / (2 * h);
    const double fd2 =
        (gamma_eval(spec, s + h).d1 - gamma_eval(spec, s - h).d1) / (2 * h);
    CHECK(std::abs(fd1 - t.d1) <= 1e-6 * std::abs(t.d1));
    CHECK(std::abs(fd2 - t.d2) <= 1e-6 * std::abs(t.d2));
  }
}

}  // namespace

TEST_CASE("closed-form triples") {
  MotilityTriple p = gamma_eval(MotilitySpec::power_law(1.0), 2.0);
  CHECK(p.value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.d1 == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(p.d2 == doctest::Approx(0.25).epsilon(1e-15));

  MotilityTriple e = gamma_eval(MotilitySpec::exponential(1.0), 0.0);
  CHECK(e.value == 1.0);
  CHECK(e.d1 == -1.0);
  CHECK(e.d2 == 1.0);

  MotilityTriple q = gamma_eval(MotilitySpec::sqrt_exp(), 4.0);
  const double g = std::exp(-2.0);
  CHECK(q.value == doctest::Approx(g).epsilon(1e-15));
  CHECK(q.d1 == doctest::Approx(-g / 4.0).epsilon(1e-15));
  CHECK(q.d2 == doctest::Approx(3.0 * g / 32.0).epsilon(1e-15));
}

TEST_CASE("derivatives match finite differences") {
  check_derivatives(MotilitySpec::power_law(0.5), 1e-3, 1e6, 250);
  check_derivatives(MotilitySpec::power_law(2.0), 1e-3, 1e6, 250);
  check_derivatives(MotilitySpec::exponential(1.0), 1e-3, 500.0, 250);
  check_derivatives(MotilitySpec::sqrt_exp(), 1e-3, 1e5, 250);
  check_derivatives(MotilitySpec::log_power(1.0), 1e-3, 1e6, 250);
  check_derivatives(MotilitySpec::log_power(0.3), 1e-3, 1e6, 250);
}

TEST_CASE("singular kinds clamp at s_min") {
  MotilitySpec p = MotilitySpec::power_law(0.5);
  MotilityTriple at_zero = gamma_eval(p, 0.0);
  MotilityTriple at_floor = gamma_eval(p, p.s_min);
  CHECK(at_zero.value == at_floor.value);
  CHECK(at_zero.d1 == at_floor.d1);
  CHECK(gamma_eval(MotilitySpec::sqrt_exp(), 0.0).d1 ==
        gamma_eval(MotilitySpec::sqrt_exp(), 1e-8).d1);
  CHECK_THROWS_AS(gamma_eval(p, -0.5), std::invalid_argument);
}

TEST_CASE("A1 certificate") {
  CHECK(check_A1(MotilitySpec::power_law(0.5), {0.1, 1e6}).holds);
  CHECK(check_A1(MotilitySpec::power_law(1.0), {0.1, 1e6}).holds);

  AssumptionReport bad = check_A1(MotilitySpec::power_law(1.5), {0.1, 1e6});
  CHECK_FALSE(bad.holds);
  CHECK(bad.has_violation);
  CHECK(bad.violation_s == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(bad.violation_value < 0.0);

  // (1 - chi s) e^{-chi s} turns negative just past s = 1/chi.
  AssumptionReport exp_bad = check_A1(MotilitySpec::exponential(1.0), {0.1, 10.0});
  CHECK_FALSE(exp_bad.holds);
  CHECK(exp_bad.violation_s > 1.0);
  CHECK(exp_bad.violation_s < 1.01);
  CHECK(check_A1(MotilitySpec::exponential(1.0), {0.1, 0.99}).holds);

  CHECK(check_A1(MotilitySpec::sqrt_exp(), {0.1, 3.9}).holds);
  AssumptionReport sq = check_A1(MotilitySpec::sqrt_exp(), {0.1, 10.0});
  CHECK_FALSE(sq.holds);
  CHECK(sq.violation_s > 4.0);
  CHECK(sq.violation_s < 4.05);
}

TEST_CASE("A2 trend certificate") {
  MotilitySpec p1 = MotilitySpec::power_law(1.0);
  CHECK(check_A2(p1, 2.0).holds);
  CHECK_FALSE(check_A2(p1, 1.0).holds);  // s^k gamma constant

  // 1/(s log(1+s)) diverges against s^{1.01}, but only extremely far out; the
  // certificate needs its huge default range to see the turn.
  MotilitySpec lp = MotilitySpec::log_power(1.0);
  CHECK(check_A2(lp, 1.01).holds);
  CHECK_FALSE(check_A2(lp, 1.0).holds);
  CHECK_FALSE(check_A2(lp, 1.01, {0.5, 1e6}).holds);

  // Stretched-exponential decay beats every power of s.
  CHECK_FALSE(check_A2(MotilitySpec::exponential(1.0), 5.0).holds);
  CHECK_FALSE(check_A2(MotilitySpec::sqrt_exp(), 0.5, {0.5, 1e10}).holds);

  CHECK_THROWS_AS(check_A2(p1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(check_A2(p1, 2.0, {1.0, 1e6}, 3), std::invalid_argument);
}

TEST_CASE("A3 infimum ratio") {
  for (double k : {0.25, 0.5, 1.0, 2.0}) {
    const double l0 = a3_sup_l0(MotilitySpec::power_law(k));
    CHECK(l0 == doctest::Approx((k + 1.0) / k).epsilon(1e-9));
  }
  CHECK(a3_sup_l0(MotilitySpec::exponential(1.0)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(a3_sup_l0(MotilitySpec::exponential(3.0)) == doctest::Approx(1.0).epsilon(1e-9));

  // gamma gamma''/gamma'^2 = 1 + 1/sqrt(s) for e^{-sqrt(s)}: infimum sits at
  // the top of the range.
  const double sq = a3_sup_l0(MotilitySpec::sqrt_exp(), {1.0, 1e6});
  CHECK(sq == doctest::Approx(1.0 + 1e-3).epsilon(1e-6));

  const double lp = a3_sup_l0(MotilitySpec::log_power(1.0));
  CHECK(lp > 1.0);
  CHECK(lp < 2.0);

  MotilitySpec flat = MotilitySpec::custom(
      [](double) { return 1.0; }, [](double) { return 0.0; },
      [](double) { return 0.0; });
  CHECK(std::isinf(a3_sup_l0(flat)));
}

TEST_CASE("A3 exponent recovery") {
  CHECK(a3_implies_a2_k(2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a3_implies_a2_k(3.0) == doctest::Approx(0.5).epsilon(1e-15));
  // Boundary case: l0 = (n + 2)/4 at n = 6 recovers exactly the admissible
  // endpoint 4/(n - 2) = 1.
  CHECK(a3_implies_a2_k((6.0 + 2.0) / 4.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(a3_implies_a2_k(1.0), std::invalid_argument);
  CHECK_THROWS_AS(a3_implies_a2_k(0.5), std::invalid_argument);
  CHECK_THROWS_AS(a3_implies_a2_k(std::numeric_limits<double>::infinity()),
                  std::invalid_argument);

  for (double k : {0.3, 0.5, 1.0, 1.7}) {
    const double back = a3_implies_a2_k(a3_sup_l0(MotilitySpec::power_law(k)));
    CHECK(back == doctest::Approx(k).epsilon(1e-9));
  }
}

TEST_CASE("A0 certificate") {
  CHECK(check_A0(MotilitySpec::power_law(0.5)).holds);
  CHECK(check_A0(MotilitySpec::exponential(2.0)).holds);
  CHECK(check_A0(MotilitySpec::sqrt_exp()).holds);
  CHECK(check_A0(MotilitySpec::log_power(0.01)).holds);

  MotilitySpec flat = MotilitySpec::custom(
      [](double) { return 1.0; }, [](double) { return 0.0; },
      [](double) { return 0.0; });
  AssumptionReport r = check_A0(flat);
  CHECK_FALSE(r.holds);  // never vanishes

  MotilitySpec rising = MotilitySpec::custom(
      [](double s) { return s; }, [](double) { return 1.0; },
      [](double) { return 0.0; });
  AssumptionReport r2 = check_A0(rising);
  CHECK_FALSE(r2.holds);
  CHECK(r2.has_violation);
}

TEST_CASE("custom callables must stay finite") {
  MotilitySpec nasty = MotilitySpec::custom(
      [](double s) {
        return s > 1.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0 / (1.0 + s);
      },
      [](double s) { return -1.0 / ((1.0 + s) * (1.0 + s)); },
      [](double s) { return 2.0 / std::pow(1.0 + s, 3.0); });
  CHECK_NOTHROW(gamma_eval(nasty, 0.5));
  CHECK_THROWS_AS(gamma_eval(nasty, 2.0), std::domain_error);
  CHECK_THROWS_AS(check_A1(nasty, {0.1, 10.0}), std::domain_error);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(MotilitySpec::power_law(0.0), std::invalid_argument);
  CHECK_THROWS_AS(MotilitySpec::power_law(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(MotilitySpec::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(MotilitySpec::log_power(-0.5), std::invalid_argument);
  CHECK_THROWS_AS(MotilitySpec::custom(nullptr, nullptr, nullptr),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      MotilitySpec::custom([](double) { return 1.0; }, [](double) { return 0.0; },
                           [](double) { return 0.0; }, -1.0),
      std::invalid_argument);
}
