#include "kslab/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "kslab/errors.hpp"

namespace kslab {

namespace {
constexpr std::size_t kDirectCellLimit = 256 * 256;
}

HelmholtzSolver::HelmholtzSolver(const Grid& grid, double tol)
    : grid_(grid), tol_(tol), direct_(grid.cell_count() <= kDirectCellLimit) {
  const auto n = static_cast<Eigen::Index>(grid_.cell_count());
  const auto& vols = grid_.cell_volumes();

  m_ = -grid_.op_matrix();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m_, j); it; ++it)
      it.valueRef() *= vols[static_cast<std::size_t>(it.row())];
  Eigen::SparseMatrix<double> vdiag(n, n);
  vdiag.setIdentity();
  for (Eigen::Index j = 0; j < n; ++j)
    vdiag.coeffRef(j, j) = vols[static_cast<std::size_t>(j)];
  m_ += vdiag;
  m_.makeCompressed();

  if (direct_) {
    ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    ldlt_->compute(m_);
    if (ldlt_->info() != Eigen::Success)
      throw SolverError("helmholtz: factorization failed", 0.0);
  } else {
    cg_ = std::make_unique<Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                                                    Eigen::Lower | Eigen::Upper>>();
    cg_->setTolerance(tol_);
    cg_->setMaxIterations(static_cast<Eigen::Index>(20) * n);
    cg_->compute(m_);
  }
}

Field HelmholtzSolver::solve(const Field& u) const {
  grid_.check_field(u);
  const auto n = static_cast<Eigen::Index>(grid_.cell_count());
  const auto& vols = grid_.cell_volumes();

  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i)
    rhs[i] = vols[static_cast<std::size_t>(i)] * u.values[static_cast<std::size_t>(i)];

  Eigen::VectorXd x;
  if (direct_) {
    x = ldlt_->solve(rhs);
  } else {
    x = cg_->solve(rhs);
    if (cg_->info() != Eigen::Success)
      throw SolverError("helmholtz: CG did not converge", cg_->error());
  }

  Field v = grid_.make_field();
  for (Eigen::Index i = 0; i < n; ++i)
    v.values[static_cast<std::size_t>(i)] = x[i];

  // Verify (I - L) v = u with the matrix-free operator.
  Field lv = grid_.laplacian(v);
  double rnorm = 0.0, unorm = 0.0;
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    const double r = v.values[i] - lv.values[i] - u.values[i];
    rnorm += vols[i] * r * r;
    unorm += vols[i] * u.values[i] * u.values[i];
  }
  rnorm = std::sqrt(rnorm);
  unorm = std::sqrt(unorm);
  const double rel = rnorm / std::max(unorm, 1e-300);
  if (unorm > 0.0 && rel > tol_ * 100.0)
    throw SolverError("helmholtz: residual check failed", rel);
  return v;
}

bool comparison_check(const HelmholtzSolver& solver, const Field& a,
                      const Field& b, double slack) {
  Field va = solver.solve(a);
  Field vb = solver.solve(b);
  double bmax = 1.0;
  for (double x : b.values) bmax = std::max(bmax, std::abs(x));
  const double tol = slack * bmax;
  for (std::size_t i = 0; i < va.values.size(); ++i)
    if (va.values[i] > vb.values[i] + tol) return false;
  return true;
}

}  // namespace kslab
