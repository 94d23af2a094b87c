#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specfloor/covmodels.hpp"
#include "specfloor/designs.hpp"

namespace specfloor {

// Sigma with entry (N_{k-1} + i, N_{l-1} + j) = c_kl(x_i^(k) - x_j^(l)).
struct CovMatrix {
  Eigen::MatrixXd entries;
  std::vector<std::size_t> offsets;
  std::string provenance;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
};

// Throws ShapeError when model.p / model.d disagree with the design.
CovMatrix assemble_sigma(const MatrixCovarianceModel &model, const Design &design);

// Throws ContractError when the matrix is not symmetric to 1e-12 (relative
// to its largest entry, floored at 1).
void require_symmetric(const Eigen::MatrixXd &matrix, const char *who);

// All eigenvalues, ascending. Dense self-adjoint solver.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd &matrix);

// lambda_1 of a symmetric matrix; `tol` must be positive and no smaller than
// the solver's attainable accuracy (about 1e-15 ||M||).
double smallest_eigenvalue(const Eigen::MatrixXd &matrix, double tol = 1e-10);

// min_i (m_ii - sum_{j != i} |m_ij|); a lower bound on lambda_1.
double gershgorin_floor(const Eigen::MatrixXd &matrix);

// diag + 2 off cos(i pi / (n + 1)), i = 1..n, sorted descending.
std::vector<double> tridiag_toeplitz_eigs(std::size_t n, double diag, double off);

Eigen::MatrixXd tridiag_toeplitz(std::size_t n, double diag, double off);

// Symmetric PSD matrix with positive diagonal, checked at construction.
class TaperMatrix {
public:
  // Throws ContractError when asymmetric, not PSD (lambda_1 < -1e-10) or
  // with a nonpositive diagonal entry.
  explicit TaperMatrix(Eigen::MatrixXd entries);

  const Eigen::MatrixXd &entries() const { return entries_; }
  double diag_min() const { return diag_min_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }

private:
  Eigen::MatrixXd entries_;
  double diag_min_;
};

// Wendland taper (1 - t)_+^4 (4 t + 1), t = |s_a - s_b| / range, on the
// concatenated design points. Positive definite for d <= 3.
TaperMatrix wendland_taper(const Design &design, double range);

Eigen::MatrixXd schur_product(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b);

// diag_min * lambda_1(Sigma): lower bound for lambda_1(Sigma o A).
double taper_floor(double sigma_lambda1, const TaperMatrix &taper);

// Row-major dense CSV, full symmetric storage, 17 significant digits.
void write_matrix_csv(std::ostream &out, const Eigen::MatrixXd &matrix);

} // namespace specfloor
