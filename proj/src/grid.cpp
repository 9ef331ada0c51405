#include "kslab/grid.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kslab/errors.hpp"
#include "kslab/hashing.hpp"

namespace kslab {

namespace {

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

}  // namespace

Grid Grid::build(const GridSpec& spec) {
  Grid g;
  g.spec_ = spec;

  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };

  switch (spec.geometry) {
    case Geometry::Interval:
      require(spec.extent[0] > 0.0 && std::isfinite(spec.extent[0]),
              "grid: interval extent must be positive and finite");
      require(spec.cells[0] >= 2, "grid: need at least 2 cells per axis");
      require(spec.ambient_dim == 0 || spec.ambient_dim == 1,
              "grid: interval ambient dimension is 1");
      g.axes_ = 1;
      g.ambient_dim_ = 1;
      g.build_interval();
      break;
    case Geometry::Rectangle:
      require(spec.extent[0] > 0.0 && spec.extent[1] > 0.0 &&
                  std::isfinite(spec.extent[0]) && std::isfinite(spec.extent[1]),
              "grid: rectangle extents must be positive and finite");
      require(spec.cells[0] >= 2 && spec.cells[1] >= 2,
              "grid: need at least 2 cells per axis");
      require(spec.ambient_dim == 0 || spec.ambient_dim == 2,
              "grid: rectangle ambient dimension is 2");
      g.axes_ = 2;
      g.ambient_dim_ = 2;
      g.build_rectangle();
      break;
    case Geometry::RadialBall:
      require(spec.extent[0] > 0.0 && std::isfinite(spec.extent[0]),
              "grid: ball radius must be positive and finite");
      require(spec.cells[0] >= 2, "grid: need at least 2 cells per axis");
      require(spec.ambient_dim >= 1 && spec.ambient_dim <= 64,
              "grid: ball ambient dimension must be in [1, 64]");
      g.axes_ = 1;
      g.ambient_dim_ = spec.ambient_dim;
      g.build_radial();
      break;
    default:
      throw std::invalid_argument("grid: unknown geometry");
  }

  std::uint64_t h = fnv1a64_mix(static_cast<int>(spec.geometry), 1469598103934665603ull);
  h = fnv1a64_mix(g.spec_.extent, h);
  h = fnv1a64_mix(g.spec_.cells, h);
  h = fnv1a64_mix(g.ambient_dim_, h);
  g.id_ = h;

  g.assemble_matrix();
  return g;
}

void Grid::build_interval() {
  const int n = spec_.cells[0];
  const double h = spec_.extent[0] / n;
  spacing_ = {h, 0.0};
  domain_volume_ = spec_.extent[0];
  volumes_.assign(static_cast<std::size_t>(n), h);
  faces_.reserve(static_cast<std::size_t>(n) - 1);
  for (int j = 1; j < n; ++j)
    faces_.push_back({j - 1, j, 1.0 / h});
}

void Grid::build_rectangle() {
  const int nx = spec_.cells[0];
  const int ny = spec_.cells[1];
  const double hx = spec_.extent[0] / nx;
  const double hy = spec_.extent[1] / ny;
  spacing_ = {hx, hy};
  domain_volume_ = spec_.extent[0] * spec_.extent[1];
  volumes_.assign(static_cast<std::size_t>(nx) * ny, hx * hy);
  faces_.reserve(static_cast<std::size_t>(nx - 1) * ny +
                 static_cast<std::size_t>(nx) * (ny - 1));
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 1; ix < nx; ++ix) {
      const int a = iy * nx + ix - 1;
      faces_.push_back({a, a + 1, hy / hx});
    }
  for (int iy = 1; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const int a = (iy - 1) * nx + ix;
      faces_.push_back({a, a + nx, hx / hy});
    }
}

void Grid::build_radial() {
  const int nc = spec_.cells[0];
  const int n = ambient_dim_;
  const double h = spec_.extent[0] / nc;
  spacing_ = {h, 0.0};
  const double vn1 = unit_ball_volume(n);
  domain_volume_ = vn1 * std::pow(spec_.extent[0], n);
  volumes_.resize(static_cast<std::size_t>(nc));
  for (int i = 0; i < nc; ++i)
    volumes_[static_cast<std::size_t>(i)] =
        vn1 * (std::pow((i + 1) * h, n) - std::pow(i * h, n));
  // Face at r=0 has zero area, face at r=R carries the zero-flux condition;
  // neither contributes.
  const double area_coef = n * vn1;  // sphere area = n * V_n(1) * r^(n-1)
  faces_.reserve(static_cast<std::size_t>(nc) - 1);
  for (int j = 1; j < nc; ++j) {
    const double r = j * h;
    faces_.push_back({j - 1, j, area_coef * std::pow(r, n - 1) / h});
  }
}

void Grid::assemble_matrix() {
  const auto n = static_cast<Eigen::Index>(cell_count());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(faces_.size() * 4 + static_cast<std::size_t>(n));
  for (const auto& f : faces_) {
    const double ca = f.coef / volumes_[static_cast<std::size_t>(f.a)];
    const double cb = f.coef / volumes_[static_cast<std::size_t>(f.b)];
    trips.emplace_back(f.a, f.a, -ca);
    trips.emplace_back(f.a, f.b, ca);
    trips.emplace_back(f.b, f.b, -cb);
    trips.emplace_back(f.b, f.a, cb);
  }
  op_.resize(n, n);
  op_.setFromTriplets(trips.begin(), trips.end());
  op_.makeCompressed();
}

double Grid::min_spacing() const {
  return axes_ == 2 ? std::min(spacing_[0], spacing_[1]) : spacing_[0];
}

std::array<double, 2> Grid::cell_center(std::size_t i) const {
  if (axes_ == 1) return {(static_cast<double>(i) + 0.5) * spacing_[0], 0.0};
  const auto nx = static_cast<std::size_t>(spec_.cells[0]);
  return {(static_cast<double>(i % nx) + 0.5) * spacing_[0],
          (static_cast<double>(i / nx) + 0.5) * spacing_[1]};
}

Field Grid::make_field(double fill) const {
  Field f;
  f.grid_id = id_;
  f.values.assign(cell_count(), fill);
  return f;
}

void Grid::check_field(const Field& f) const {
  if (f.grid_id != id_ || f.values.size() != cell_count())
    throw std::invalid_argument("field does not belong to this grid");
}

void Grid::laplacian_apply(const Field& f, Field& out) const {
  check_field(f);
  if (out.grid_id != id_ || out.values.size() != cell_count()) out = make_field();
  std::fill(out.values.begin(), out.values.end(), 0.0);
  for (const auto& fc : faces_) {
    const auto a = static_cast<std::size_t>(fc.a);
    const auto b = static_cast<std::size_t>(fc.b);
    const double flux = fc.coef * (f.values[b] - f.values[a]);
    out.values[a] += flux / volumes_[a];
    out.values[b] -= flux / volumes_[b];
  }
}

Field Grid::laplacian(const Field& f) const {
  Field out = make_field();
  laplacian_apply(f, out);
  return out;
}

double Grid::integrate(const Field& f) const {
  check_field(f);
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += volumes_[i] * f.values[i];
  return s;
}

double Grid::inner(const Field& a, const Field& b) const {
  check_field(a);
  check_field(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    s += volumes_[i] * a.values[i] * b.values[i];
  return s;
}

double Grid::dirichlet_form(const Field& a, const Field& b) const {
  check_field(a);
  check_field(b);
  double s = 0.0;
  for (const auto& fc : faces_) {
    const auto i = static_cast<std::size_t>(fc.a);
    const auto j = static_cast<std::size_t>(fc.b);
    s += fc.coef * (a.values[j] - a.values[i]) * (b.values[j] - b.values[i]);
  }
  return s;
}

double Grid::grad_sq_norm(const Field& f) const {
  check_field(f);
  double s = 0.0;
  for (const auto& fc : faces_) {
    const double d =
        f.values[static_cast<std::size_t>(fc.b)] - f.values[static_cast<std::size_t>(fc.a)];
    s += fc.coef * d * d;
  }
  return s;
}

double neumann_mu1(const Grid& grid) {
  const auto& spec = grid.spec();
  const double pi = std::numbers::pi;
  switch (spec.geometry) {
    case Geometry::Interval: {
      const double r = pi / spec.extent[0];
      return r * r;
    }
    case Geometry::Rectangle: {
      const double rx = pi / spec.extent[0];
      const double ry = pi / spec.extent[1];
      return std::min(rx * rx, ry * ry);
    }
    default:
      return neumann_mu1_numeric(grid);
  }
}

double neumann_mu1_numeric(const Grid& grid, const Mu1Options& opts) {
  const auto n = static_cast<Eigen::Index>(grid.cell_count());
  const auto& vols = grid.cell_volumes();

  // M = V(I - L) is SPD in the plain inner product; inverse power iteration
  // on (I - L)^{-1} over the volume-weighted mean-zero subspace.
  Eigen::SparseMatrix<double> m = -grid.op_matrix();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it)
      it.valueRef() *= vols[static_cast<std::size_t>(it.row())];
  Eigen::SparseMatrix<double> vdiag(n, n);
  vdiag.setIdentity();
  for (Eigen::Index j = 0; j < n; ++j)
    vdiag.coeffRef(j, j) = vols[static_cast<std::size_t>(j)];
  m += vdiag;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(m);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("mu1: factorization of I - L failed", 0.0);

  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(vols.data(), n);
  const double total = v.sum();
  auto project = [&](Eigen::VectorXd& x) {
    x.array() -= x.dot(v) / total;
  };

  // Seed with the coordinate along the widest axis: overlaps the lowest
  // nonconstant mode for every supported geometry.
  Eigen::VectorXd x(n);
  const int axis =
      (grid.axes() == 2 && grid.spec().extent[1] > grid.spec().extent[0]) ? 1 : 0;
  for (Eigen::Index i = 0; i < n; ++i)
    x[i] = grid.cell_center(static_cast<std::size_t>(i))[static_cast<std::size_t>(axis)];
  project(x);
  x /= std::sqrt(x.dot(v.asDiagonal() * x));

  double theta_prev = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    Eigen::VectorXd y = ldlt.solve(v.asDiagonal() * x);
    project(y);
    const double theta = x.dot(v.asDiagonal() * y);
    const double norm = std::sqrt(y.dot(v.asDiagonal() * y));
    if (norm <= 0.0) throw SolverError("mu1: iteration collapsed", 0.0);
    x = y / norm;
    if (it > 0 && std::abs(theta - theta_prev) <= opts.tol * std::abs(theta))
      return 1.0 / theta - 1.0;
    theta_prev = theta;
  }
  throw SolverError("mu1: power iteration did not converge",
                    std::abs(theta_prev));
}

}  // namespace kslab
