#include "encl/fv.hpp"

#include <cmath>

#include "encl/errors.hpp"

namespace encl {

FvOperator::FvOperator(const Grid& grid, const ConductivitySpec& cond,
                       const InclusionScene& scene)
    : grid_(&grid) {
  const int dim = grid.dim();
  const int n_cells = grid.num_cells();
  tensors_.reserve(n_cells);
  for (int c = 0; c < n_cells; ++c) {
    tensors_.push_back(
        cell_conductivity(cond, scene, grid.cell_center(c), grid.h(), dim));
    for (int a = 0; a < dim && !has_offdiag_; ++a)
      for (int b = a + 1; b < dim; ++b)
        if (std::abs(tensors_.back()(a, b)) > 1e-14) has_offdiag_ = true;
  }

  const double face_over_dist = std::pow(grid.h(), dim - 2);  // h^{d-1}/h
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n_cells) * (2 * dim + 1));
  for (int c = 0; c < n_cells; ++c) {
    double diag = 0;
    for (int a = 0; a < dim; ++a)
      for (int s = -1; s <= 1; s += 2) {
        const int nb = grid.neighbor(c, a, s);
        if (nb < 0) continue;  // Neumann boundary: no flux term
        const double k1 = tensors_[c](a, a);
        const double k2 = tensors_[nb](a, a);
        const double t = face_over_dist * 2.0 * k1 * k2 / (k1 + k2);
        diag += t;
        trips.emplace_back(c, nb, -t);
      }
    trips.emplace_back(c, c, diag);
  }
  stiffness_.resize(n_cells, n_cells);
  stiffness_.setFromTriplets(trips.begin(), trips.end());
}

Eigen::VectorXd FvOperator::boundary_load(
    const Eigen::VectorXd& facet_values) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(grid_->num_cells());
  const auto& facets = grid_->facets();
  for (std::size_t i = 0; i < facets.size(); ++i)
    b[facets[i].cell] += facet_values[static_cast<Eigen::Index>(i)] *
                         facets[i].measure;
  return b;
}

Eigen::VectorXd FvOperator::offdiagonal_load(const Eigen::VectorXd& u) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(grid_->num_cells());
  if (!has_offdiag_) return b;
  const int dim = grid_->dim();
  const double h = grid_->h();
  const double face_area = std::pow(h, dim - 1);

  // cell-centered gradient by centered differences (one-sided at the
  // staircase boundary)
  const int n_cells = grid_->num_cells();
  Eigen::MatrixXd grad(n_cells, dim);
  for (int c = 0; c < n_cells; ++c)
    for (int a = 0; a < dim; ++a) {
      const int up = grid_->neighbor(c, a, +1);
      const int dn = grid_->neighbor(c, a, -1);
      if (up >= 0 && dn >= 0)
        grad(c, a) = (u[up] - u[dn]) / (2 * h);
      else if (up >= 0)
        grad(c, a) = (u[up] - u[c]) / h;
      else if (dn >= 0)
        grad(c, a) = (u[c] - u[dn]) / h;
      else
        grad(c, a) = 0;
    }

  for (int c = 0; c < n_cells; ++c)
    for (int a = 0; a < dim; ++a) {
      const int nb = grid_->neighbor(c, a, +1);
      if (nb < 0) continue;
      double flux = 0;  // off-diagonal part of (gamma grad u) . e_a at the face
      for (int t = 0; t < dim; ++t) {
        if (t == a) continue;
        const double gat = 0.5 * (tensors_[c](a, t) + tensors_[nb](a, t));
        flux += gat * 0.5 * (grad(c, t) + grad(nb, t));
      }
      const double q = face_area * flux;
      b[c] += q;
      b[nb] -= q;
    }
  return b;
}

double FvOperator::energy_form(const Eigen::VectorXd& u,
                               const Eigen::VectorXd& w) const {
  return u.dot(stiffness_ * w);
}

LinearSolver::LinearSolver(const Eigen::SparseMatrix<double>& m,
                           int iteration_cap, double tolerance)
    : matrix_(m), tolerance_(tolerance) {
  direct_ = m.rows() <= 200000;
  if (direct_) {
    ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    ldlt_->compute(matrix_);
    if (ldlt_->info() != Eigen::Success)
      throw SolverError("sparse factorization failed", 0.0);
  } else {
    cg_ = std::make_unique<Eigen::ConjugateGradient<
        Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
        Eigen::IncompleteCholesky<double>>>();
    cg_->setTolerance(tolerance_);
    cg_->setMaxIterations(iteration_cap);
    cg_->compute(matrix_);
    if (cg_->info() != Eigen::Success)
      throw SolverError("CG preconditioner setup failed", 0.0);
  }
}

void LinearSolver::check_residual(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& rhs) const {
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0) return;
  const double res = (matrix_ * x - rhs).norm() / rhs_norm;
  if (res > 1e-8)
    throw SolverError("linear solve did not reach the residual contract", res);
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = direct_ ? ldlt_->solve(rhs).eval() : cg_->solve(rhs).eval();
  check_residual(x, rhs);
  return x;
}

Eigen::VectorXd LinearSolver::solve_with_guess(
    const Eigen::VectorXd& rhs, const Eigen::VectorXd& guess) const {
  if (direct_) return solve(rhs);
  Eigen::VectorXd x = cg_->solveWithGuess(rhs, guess);
  check_residual(x, rhs);
  return x;
}

}  // namespace encl
