#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kslab/errors.hpp"
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

Field sample(const Grid& g, double (*fn)(double, double)) {
  Field f = g.make_field();
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    auto c = g.cell_center(i);
    f[i] = fn(c[0], c[1]);
  }
  return f;
}

Field random_field(const Grid& g, std::mt19937_64& rng, double lo = -1.0,
                   double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f = g.make_field();
  for (auto& x : f.values) x = dist(rng);
  return f;
}

double linf(const Field& f) {
  double m = 0.0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

// Max-norm error of the discrete Laplacian against -cos on Interval(pi).
double cos_laplacian_err(int cells) {
  Grid g = interval(pi, cells);
  Field f = sample(g, [](double x, double) { return std::cos(x); });
  Field lf = g.laplacian(f);
  double err = 0.0;
  for (std::size_t i = 0; i < g.cell_count(); ++i)
    err = std::max(err, std::abs(lf[i] + f[i]));
  return err;
}

}  // namespace

TEST_CASE("interval construction") {
  Grid g = interval(pi, 64);
  CHECK(g.cell_count() == 64);
  CHECK(g.spacing(0) == pi / 64);
  CHECK(g.ambient_dim() == 1);
  double total = 0.0;
  for (double v : g.cell_volumes()) total += v;
  CHECK(std::abs(total - pi) <= 1e-12 * pi);
  CHECK(g.cell_center(0)[0] == doctest::Approx(0.5 * pi / 64).epsilon(1e-15));
}

TEST_CASE("rectangle construction") {
  Grid g = rectangle(2.0, 1.0, 8, 4);
  CHECK(g.cell_count() == 32);
  CHECK(g.spacing(0) == 0.25);
  CHECK(g.spacing(1) == 0.25);
  CHECK(g.ambient_dim() == 2);
  auto c = g.cell_center(1 + 2 * 8);
  CHECK(c[0] == doctest::Approx(1.5 * 0.25).epsilon(1e-15));
  CHECK(c[1] == doctest::Approx(2.5 * 0.25).epsilon(1e-15));
  double total = 0.0;
  for (double v : g.cell_volumes()) total += v;
  CHECK(std::abs(total - 2.0) <= 1e-12 * 2.0);
}

TEST_CASE("radial ball volumes") {
  // 4-ball of radius 1 has volume pi^2/2; shell volumes are exact, so the sum
  // should hit it at roundoff, far inside the 1e-3 budget.
  Grid g = radial(1.0, 100, 4);
  double total = 0.0;
  for (double v : g.cell_volumes()) total += v;
  CHECK(std::abs(total - pi * pi / 2.0) <= 1e-12);
  CHECK(g.domain_volume() == doctest::Approx(pi * pi / 2.0).epsilon(1e-14));
}

TEST_CASE("construction rejects bad specs") {
  CHECK_THROWS_AS(interval(pi, 1), std::invalid_argument);
  CHECK_THROWS_AS(interval(-1.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(interval(0.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(rectangle(1.0, 1.0, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(radial(1.0, 16, 0), std::invalid_argument);
  CHECK_THROWS_AS(
      Grid::build({Geometry::Interval,
                   {std::numeric_limits<double>::infinity(), 0.0},
                   {8, 0},
                   0}),
      std::invalid_argument);
}

TEST_CASE("laplacian annihilates constants") {
  for (const Grid& g : {interval(pi, 32), rectangle(2.0, 1.0, 8, 6), radial(1.0, 20, 3)}) {
    Field f = g.make_field(5.0);
    Field lf = g.laplacian(f);
    for (double x : lf.values) CHECK(x == 0.0);
  }
}

TEST_CASE("laplacian second-order consistency on cos") {
  const double e64 = cos_laplacian_err(64);
  const double e128 = cos_laplacian_err(128);
  const double e256 = cos_laplacian_err(256);
  CHECK(e64 < 3e-4);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(e128 / e256 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("discrete divergence theorem") {
  std::mt19937_64 rng(12345);
  for (const Grid& g : {interval(pi, 47), rectangle(2.0, 1.5, 13, 9), radial(1.0, 33, 4)}) {
    for (int rep = 0; rep < 20; ++rep) {
      Field f = random_field(g, rng);
      Field lf = g.laplacian(f);
      double total = 0.0;
      for (std::size_t i = 0; i < g.cell_count(); ++i)
        total += g.cell_volumes()[i] * lf[i];
      CHECK(std::abs(total) < 1e-12 * linf(f) * g.domain_volume());
    }
  }
}

TEST_CASE("laplacian is symmetric in the volume inner product") {
  std::mt19937_64 rng(777);
  for (const Grid& g : {interval(1.0, 21), rectangle(3.0, 2.0, 7, 11), radial(2.0, 25, 5)}) {
    for (int rep = 0; rep < 10; ++rep) {
      Field f = random_field(g, rng);
      Field h = random_field(g, rng);
      const double a = g.inner(f, g.laplacian(h));
      const double b = g.inner(g.laplacian(f), h);
      const double scale = std::max({std::abs(a), std::abs(b), 1e-30});
      CHECK(std::abs(a - b) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("radial laplacian of r^2 equals 2n on interior cells") {
  for (int n : {2, 3, 5}) {
    Grid g = radial(1.0, 40, n);
    Field f = sample(g, [](double r, double) { return r * r; });
    Field lf = g.laplacian(f);
    // The last cell carries the zero-flux boundary closure; every interior
    // cell reproduces the constant exactly.
    for (std::size_t i = 0; i + 1 < g.cell_count(); ++i)
      CHECK(lf[i] == doctest::Approx(2.0 * n).epsilon(1e-10));
  }
}

TEST_CASE("integrate and inner products") {
  Grid g = interval(pi, 64);
  Field one = g.make_field(1.0);
  CHECK(g.integrate(one) == doctest::Approx(pi).epsilon(1e-14));
  Field c = sample(g, [](double x, double) { return std::cos(x); });
  CHECK(std::abs(g.integrate(c)) < 1e-13);
  CHECK(g.inner(c, c) == doctest::Approx(pi / 2.0).epsilon(1e-12));
}

TEST_CASE("grad_sq_norm matches quadratic form and analytic value") {
  Grid g = interval(pi, 64);
  Field c = sample(g, [](double x, double) { return std::cos(x); });
  const double gs = g.grad_sq_norm(c);
  CHECK(gs == doctest::Approx(pi / 2.0).epsilon(3e-3));
  CHECK(-g.inner(c, g.laplacian(c)) == doctest::Approx(gs).epsilon(1e-12));

  const double gs128 =
      interval(pi, 128).grad_sq_norm(sample(interval(pi, 128), [](double x, double) {
        return std::cos(x);
      }));
  CHECK(std::abs(gs - pi / 2) / std::abs(gs128 - pi / 2) ==
        doctest::Approx(4.0).epsilon(0.15));

  std::mt19937_64 rng(42);
  for (const Grid& gg : {rectangle(2.0, 1.0, 9, 7), radial(1.0, 19, 3)}) {
    Field f = random_field(gg, rng);
    const double a = gg.grad_sq_norm(f);
    const double b = -gg.inner(f, gg.laplacian(f));
    CHECK(std::abs(a - b) <= 1e-12 * std::max(a, 1.0));
  }

  Field flat = g.make_field(3.25);
  CHECK(g.grad_sq_norm(flat) == 0.0);
}

TEST_CASE("mu1 analytic values") {
  CHECK(neumann_mu1(interval(pi, 16)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(neumann_mu1(rectangle(2 * pi, pi, 8, 4)) ==
        doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("mu1 numeric path converges at second order") {
  const double m64 = neumann_mu1_numeric(interval(pi, 64));
  CHECK(std::abs(m64 - 1.0) < 1e-3);
  const double m128 = neumann_mu1_numeric(interval(pi, 128));
  CHECK(std::abs(m64 - 1.0) / std::abs(m128 - 1.0) ==
        doctest::Approx(4.0).epsilon(0.1));
  const double r = neumann_mu1_numeric(rectangle(2 * pi, pi, 48, 24));
  CHECK(r == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("mu1 numeric matches radial eigenvalue oracles") {
  // Disk (n=2): first nonzero radial Neumann eigenvalue is the square of the
  // first positive zero of J1.
  double lo = 3.0, hi = 4.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::cyl_bessel_j(1, mid) > 0.0 ? lo : hi) = mid;
  }
  const double j1_zero = 0.5 * (lo + hi);
  const double mu_disk = neumann_mu1_numeric(radial(1.0, 1000, 2));
  CHECK(mu_disk == doctest::Approx(j1_zero * j1_zero).epsilon(1e-4));

  // Ball (n=3): eigenvalue is x^2 with tan(x) = x, i.e. sin(x) - x cos(x) = 0.
  lo = 4.0, hi = 4.6;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::sin(mid) - mid * std::cos(mid) > 0.0 ? lo : hi) = mid;
  }
  const double x3 = 0.5 * (lo + hi);
  const double mu_ball = neumann_mu1_numeric(radial(1.0, 800, 3));
  CHECK(mu_ball == doctest::Approx(x3 * x3).epsilon(1e-4));
}

TEST_CASE("mu1 numeric reports non-convergence") {
  Mu1Options opts;
  opts.tol = 0.0;
  opts.max_iters = 2;
  CHECK_THROWS_AS(neumann_mu1_numeric(interval(pi, 32), opts), SolverError);
}

TEST_CASE("operators reject fields from another grid") {
  Grid a = interval(pi, 32);
  Grid b = interval(pi, 64);
  Field f = a.make_field(1.0);
  CHECK_THROWS_AS(b.integrate(f), std::invalid_argument);
  CHECK_THROWS_AS(b.laplacian(f), std::invalid_argument);
  CHECK_THROWS_AS(b.grad_sq_norm(f), std::invalid_argument);
}
