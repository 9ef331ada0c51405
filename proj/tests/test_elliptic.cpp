#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kslab/elliptic.hpp"
#include "kslab/grid.hpp"

using namespace kslab;
using std::numbers::pi;

namespace {

Grid interval(double length, int cells) {
  return Grid::build({Geometry::Interval, {length, 0.0}, {cells, 0}, 0});
}

Grid rectangle(double lx, double ly, int nx, int ny) {
  return Grid::build({Geometry::Rectangle, {lx, ly}, {nx, ny}, 0});
}

Grid radial(double radius, int cells, int dim) {
  return Grid::build({Geometry::RadialBall, {radius, 0.0}, {cells, 0}, dim});
}

double linf(const Field& f) {
  double m = 0.0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

// Max error of solve(1 + cos x) against 1 + cos(x)/2 on Interval(pi).
double interval_mode_err(int cells) {
  Grid g = interval(pi, cells);
  HelmholtzSolver solver(g);
  Field u = g.make_field();
  for (std::size_t i = 0; i < g.cell_count(); ++i)
    u[i] = 1.0 + std::cos(g.cell_center(i)[0]);
  Field v = solver.solve(u);
  double err = 0.0;
  for (std::size_t i = 0; i < g.cell_count(); ++i)
    err = std::max(err,
                   std::abs(v[i] - (1.0 + 0.5 * std::cos(g.cell_center(i)[0]))));
  return err;
}

// Max error of solve(1 + cos x cos 2y) against the exact mode on
// Rectangle(pi, pi/2); (I - Lap) keeps the mode with factor 1/(1 + 1 + 4).
double rectangle_mode_err(int nx) {
  Grid g = rectangle(pi, pi / 2, nx, nx / 2);
  HelmholtzSolver solver(g);
  Field u = g.make_field();
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    auto c = g.cell_center(i);
    u[i] = 1.0 + std::cos(c[0]) * std::cos(2.0 * c[1]);
  }
  Field v = solver.solve(u);
  double err = 0.0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    auto c = g.cell_center(i);
    err = std::max(
        err, std::abs(v[i] - (1.0 + std::cos(c[0]) * std::cos(2.0 * c[1]) / 6.0)));
  }
  return err;
}

}  // namespace

TEST_CASE("constants are fixed points") {
  for (const Grid& g : {interval(pi, 48), rectangle(2.0, 1.0, 12, 8), radial(1.0, 30, 3)}) {
    HelmholtzSolver solver(g);
    Field u = g.make_field(2.5);
    Field v = solver.solve(u);
    for (double x : v.values) CHECK(x == doctest::Approx(2.5).epsilon(1e-13));
  }
}

TEST_CASE("interval cosine mode converges at second order") {
  const double e128 = interval_mode_err(128);
  const double e256 = interval_mode_err(256);
  CHECK(e256 < 2e-4);
  CHECK(e128 / e256 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("rectangle product mode converges at second order") {
  const double e64 = rectangle_mode_err(64);
  const double e128 = rectangle_mode_err(128);
  CHECK(e64 < 2e-3);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("mean preservation on random data") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-3.0, 5.0);
  for (const Grid& g : {interval(pi, 57), rectangle(1.5, 2.5, 11, 13), radial(2.0, 41, 4)}) {
    HelmholtzSolver solver(g);
    for (int rep = 0; rep < 25; ++rep) {
      Field u = g.make_field();
      for (auto& x : u.values) x = dist(rng);
      Field v = solver.solve(u);
      const double mu = g.integrate(u);
      const double mv = g.integrate(v);
      CHECK(std::abs(mv - mu) <= 1e-11 * std::abs(mu) + 1e-14);
    }
  }
}

TEST_CASE("positivity for nonnegative sources") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Grid g = rectangle(2.0, 2.0, 24, 24);
  HelmholtzSolver solver(g);
  for (int rep = 0; rep < 10; ++rep) {
    Field u = g.make_field();
    for (auto& x : u.values) {
      const double r = dist(rng);
      x = r < 0.5 ? 0.0 : r;  // plenty of exact zeros
    }
    if (g.integrate(u) == 0.0) u[0] = 1.0;
    Field v = solver.solve(u);
    for (double x : v.values) CHECK(x > 0.0);
  }
}

TEST_CASE("maximum principle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Grid g = interval(3.0, 50);
  HelmholtzSolver solver(g);
  for (int rep = 0; rep < 25; ++rep) {
    Field u = g.make_field();
    double lo = 1e300, hi = -1e300;
    for (auto& x : u.values) {
      x = dist(rng);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    Field v = solver.solve(u);
    const double slack = 1e-10 * linf(u);
    for (double x : v.values) {
      CHECK(x >= lo - slack);
      CHECK(x <= hi + slack);
    }
  }
}

TEST_CASE("comparison check") {
  Grid g = interval(pi, 32);
  HelmholtzSolver solver(g);
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> dist(0.0, 1.0);

  Field zero = g.make_field(0.0);
  Field one = g.make_field(1.0);
  CHECK(comparison_check(solver, zero, one));
  CHECK_FALSE(comparison_check(solver, one, zero));

  Field u = g.make_field();
  for (auto& x : u.values) x = dist(rng);
  Field u_eps = u;
  for (auto& x : u_eps.values) x += 1e-12;
  CHECK(comparison_check(solver, u, u_eps));
  CHECK(comparison_check(solver, u_eps, u));  // tolerance absorbs the shift

  for (int rep = 0; rep < 1000; ++rep) {
    Field a = g.make_field();
    Field b = g.make_field();
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      a[i] = dist(rng);
      b[i] = a[i] + dist(rng);
    }
    CHECK(comparison_check(solver, a, b));
  }
}

TEST_CASE("residual meets the advertised tolerance") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> dist(-1.0, 4.0);
  for (const Grid& g : {interval(pi, 200), rectangle(4.0, 4.0, 48, 48)}) {
    HelmholtzSolver solver(g);
    Field u = g.make_field();
    for (auto& x : u.values) x = dist(rng);
    Field v = solver.solve(u);
    Field lv = g.laplacian(v);
    double rnorm = 0.0, unorm = 0.0;
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      const double r = v[i] - lv[i] - u[i];
      rnorm += g.cell_volumes()[i] * r * r;
      unorm += g.cell_volumes()[i] * u[i] * u[i];
    }
    CHECK(std::sqrt(rnorm) <= 1e-12 * std::sqrt(unorm));
  }
}

TEST_CASE("large grids take the CG path and stay accurate") {
  Grid g = rectangle(pi, pi, 260, 260);
  HelmholtzSolver solver(g);
  CHECK_FALSE(solver.direct());
  Field u = g.make_field();
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    auto c = g.cell_center(i);
    u[i] = 1.0 + std::cos(c[0]) * std::cos(c[1]);
  }
  Field v = solver.solve(u);
  double err = 0.0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    auto c = g.cell_center(i);
    err = std::max(err,
                   std::abs(v[i] - (1.0 + std::cos(c[0]) * std::cos(c[1]) / 3.0)));
  }
  CHECK(err < 1e-3);
  CHECK(std::abs(g.integrate(v) - g.integrate(u)) <=
        1e-10 * std::abs(g.integrate(u)));
}

TEST_CASE("solver rejects fields from another grid") {
  Grid a = interval(pi, 32);
  Grid b = interval(pi, 64);
  HelmholtzSolver solver(a);
  CHECK_THROWS_AS(solver.solve(b.make_field(1.0)), std::invalid_argument);
}
