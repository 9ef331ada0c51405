#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <memory>

#include "kslab/grid.hpp"

namespace kslab {

// Solves (I - Laplacian) v = u with zero-flux boundaries. The volume-scaled
// system V(I - L) is symmetric positive definite and an M-matrix, which is
// what gives mean preservation, positivity, and the comparison property.
// Direct Cholesky up to 256^2 cells, preconditioned CG beyond.
class HelmholtzSolver {
 public:
  explicit HelmholtzSolver(const Grid& grid, double tol = 1e-12);

  // Residual-checked solve; throws SolverError if the relative residual of
  // (I - L) v = u exceeds the tolerance.
  Field solve(const Field& u) const;

  const Grid& grid() const { return grid_; }
  double tolerance() const { return tol_; }
  bool direct() const { return direct_; }

 private:
  Grid grid_;
  double tol_;
  bool direct_;
  Eigen::SparseMatrix<double> m_;  // V(I - L)
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
  std::unique_ptr<Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                                           Eigen::Lower | Eigen::Upper>>
      cg_;
};

// Entrywise solve(a) <= solve(b) + slack, with slack scaled by max(1, |b|_inf).
bool comparison_check(const HelmholtzSolver& solver, const Field& a,
                      const Field& b, double slack = 1e-10);

}  // namespace kslab
