#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <cstdint>
#include <vector>

#include "kslab/field.hpp"

namespace kslab {

enum class Geometry { Interval, Rectangle, RadialBall };

struct GridSpec {
  Geometry geometry = Geometry::Interval;
  std::array<double, 2> extent{0.0, 0.0};  // [L] / [Lx,Ly] / [R]
  std::array<int, 2> cells{0, 0};
  int ambient_dim = 0;  // RadialBall only; implied 1 / 2 otherwise
};

// Cell-centered finite-volume mesh with zero-flux (reflecting) boundaries.
// RadialBall discretizes the radial coordinate of an n-ball; cell volumes are
// exact shell volumes, so quadrature and the divergence theorem hold to
// roundoff.
class Grid {
 public:
  static Grid build(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  std::uint64_t id() const { return id_; }
  int axes() const { return axes_; }
  int ambient_dim() const { return ambient_dim_; }
  std::size_t cell_count() const { return volumes_.size(); }
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
  double min_spacing() const;
  double domain_volume() const { return domain_volume_; }
  const std::vector<double>& cell_volumes() const { return volumes_; }
  std::array<double, 2> cell_center(std::size_t i) const;

  Field make_field(double fill = 0.0) const;
  void check_field(const Field& f) const;

  // (Lf)_i = (1/vol_i) * sum of signed face fluxes; exact discrete divergence
  // form, symmetric in the volume inner product, annihilates constants.
  void laplacian_apply(const Field& f, Field& out) const;
  Field laplacian(const Field& f) const;
  const Eigen::SparseMatrix<double>& op_matrix() const { return op_; }

  double integrate(const Field& f) const;
  double inner(const Field& a, const Field& b) const;
  // Discrete Dirichlet form: sum over faces of (area/h) * (delta a)(delta b);
  // equals -<a, L b> exactly by summation by parts.
  double dirichlet_form(const Field& a, const Field& b) const;
  double grad_sq_norm(const Field& f) const;

 private:
  struct Face {
    std::int32_t a = 0;
    std::int32_t b = 0;
    double coef = 0.0;  // area / spacing, so flux = coef * (f_b - f_a)
  };

  GridSpec spec_;
  std::uint64_t id_ = 0;
  int axes_ = 1;
  int ambient_dim_ = 1;
  std::array<double, 2> spacing_{0.0, 0.0};
  double domain_volume_ = 0.0;
  std::vector<double> volumes_;
  std::vector<Face> faces_;
  Eigen::SparseMatrix<double> op_;

  void build_interval();
  void build_rectangle();
  void build_radial();
  void assemble_matrix();
};

struct Mu1Options {
  double tol = 1e-12;
  int max_iters = 20000;
};

// First nonzero Neumann eigenvalue of -Laplacian. Interval/Rectangle are
// closed-form (min over axes of (pi/L)^2); RadialBall reports the first
// nonzero eigenvalue of the discrete radial operator.
double neumann_mu1(const Grid& grid);
double neumann_mu1_numeric(const Grid& grid, const Mu1Options& opts = {});

}  // namespace kslab
