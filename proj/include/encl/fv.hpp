#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>
#include <memory>
#include <vector>

#include "encl/conductivity.hpp"
#include "encl/geometry.hpp"

namespace encl {

/// Two-point finite-volume discretization of -div(gamma grad .) on the
/// inside-cell set, with Neumann data entering as facet sources.  Face
/// conductivities are harmonic means of the face-normal projections of the
/// adjacent cell tensors, so the operator is SPD and conservative; the
/// off-diagonal tensor part is carried as an explicit deferred correction.
class FvOperator {
public:
  FvOperator(const Grid& grid, const ConductivitySpec& cond,
             const InclusionScene& scene);

  const Eigen::SparseMatrix<double>& stiffness() const { return stiffness_; }
  const Grid& grid() const { return *grid_; }
  bool has_offdiagonal() const { return has_offdiag_; }

  /// gamma at cell c (blended on cut cells), d x d.
  const Eigen::MatrixXd& cell_tensor(int c) const { return tensors_[c]; }

  /// Source vector from facet Neumann values: b[cell] += phi * measure.
  Eigen::VectorXd boundary_load(const Eigen::VectorXd& facet_values) const;

  /// Deferred-correction load from the off-diagonal tensor entries,
  /// evaluated on a given field.  Zero for diagonal tensors.
  Eigen::VectorXd offdiagonal_load(const Eigen::VectorXd& u) const;

  /// a_gamma(u, w) = u^T A w (the discrete energy form, TPFA part).
  double energy_form(const Eigen::VectorXd& u, const Eigen::VectorXd& w) const;

private:
  const Grid* grid_;
  std::vector<Eigen::MatrixXd> tensors_;
  Eigen::SparseMatrix<double> stiffness_;
  bool has_offdiag_ = false;
};

/// Direct (LDLT) for small systems, preconditioned CG above a size
/// threshold.  Both report the achieved relative residual.
class LinearSolver {
public:
  LinearSolver(const Eigen::SparseMatrix<double>& m, int iteration_cap,
               double tolerance = 1e-12);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd solve_with_guess(const Eigen::VectorXd& rhs,
                                   const Eigen::VectorXd& guess) const;

private:
  Eigen::SparseMatrix<double> matrix_;
  double tolerance_;
  bool direct_;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
  std::unique_ptr<Eigen::ConjugateGradient<
      Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
      Eigen::IncompleteCholesky<double>>>
      cg_;
  void check_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) const;
};

}  // namespace encl
