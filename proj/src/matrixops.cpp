#include "specfloor/matrixops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <functional>
#include <numbers>
#include <ostream>

#include "specfloor/errors.hpp"
#include "specfloor/parallel.hpp"

namespace specfloor {

CovMatrix assemble_sigma(const MatrixCovarianceModel &model, const Design &design) {
  if (model.p() != design.process_count()) {
    throw ShapeError("model has p = " + std::to_string(model.p()) + " but design has " +
                     std::to_string(design.process_count()) + " processes");
  }
  if (model.d() != design.d()) {
    throw ShapeError("model has d = " + std::to_string(model.d()) +
                     " but design has d = " + std::to_string(design.d()));
  }
  const std::size_t n = design.total();
  const auto &offsets = design.offsets();

  // Flattened point list with owning process.
  std::vector<const Point *> points(n);
  std::vector<std::size_t> owner(n);
  for (std::size_t k = 0; k < design.process_count(); ++k) {
    for (std::size_t i = 0; i < design.count(k); ++i) {
      points[offsets[k] + i] = &design.process(k)[i];
      owner[offsets[k] + i] = k;
    }
  }

  CovMatrix sigma;
  sigma.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  sigma.offsets = offsets;
  sigma.provenance = model.describe();

  const auto dim = static_cast<std::size_t>(design.d());
  parallel_for(n, [&](std::size_t a) {
    std::vector<double> lag(dim);
    for (std::size_t b = a; b < n; ++b) {
      for (std::size_t j = 0; j < dim; ++j) {
        lag[j] = (*points[a])[j] - (*points[b])[j];
      }
      const double value = model.eval(owner[a], owner[b], lag);
      sigma.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = value;
    }
  });
  for (Eigen::Index a = 0; a < sigma.entries.rows(); ++a) {
    for (Eigen::Index b = 0; b < a; ++b) {
      sigma.entries(a, b) = sigma.entries(b, a);
    }
  }
  return sigma;
}

void require_symmetric(const Eigen::MatrixXd &matrix, const char *who) {
  if (matrix.rows() != matrix.cols()) {
    throw ContractError(std::string(who) + ": matrix is not square");
  }
  if (matrix.size() == 0) {
    throw ContractError(std::string(who) + ": matrix is empty");
  }
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  const double defect = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (!(defect <= 1e-12 * scale)) {
    throw ContractError(std::string(who) + ": matrix is not symmetric (defect " +
                        std::to_string(defect) + ")");
  }
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd &matrix) {
  require_symmetric(matrix, "symmetric_eigenvalues");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ContractError("symmetric_eigenvalues: solver did not converge");
  }
  return solver.eigenvalues();
}

double smallest_eigenvalue(const Eigen::MatrixXd &matrix, double tol) {
  if (!(tol > 0.0)) {
    throw ParameterError("smallest_eigenvalue: tol must be positive");
  }
  return symmetric_eigenvalues(matrix)(0);
}

double gershgorin_floor(const Eigen::MatrixXd &matrix) {
  require_symmetric(matrix, "gershgorin_floor");
  double floor = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    const double radius = matrix.row(i).cwiseAbs().sum() - std::abs(matrix(i, i));
    floor = std::min(floor, matrix(i, i) - radius);
  }
  return floor;
}

std::vector<double> tridiag_toeplitz_eigs(std::size_t n, double diag, double off) {
  if (n == 0) {
    throw ParameterError("tridiag_toeplitz_eigs: n must be at least 1");
  }
  std::vector<double> values(n);
  for (std::size_t i = 1; i <= n; ++i) {
    values[i - 1] = diag + 2.0 * off *
                               std::cos(static_cast<double>(i) * std::numbers::pi /
                                        static_cast<double>(n + 1));
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

Eigen::MatrixXd tridiag_toeplitz(std::size_t n, double diag, double off) {
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    m(i, i) = diag;
    if (i + 1 < size) {
      m(i, i + 1) = off;
      m(i + 1, i) = off;
    }
  }
  return m;
}

TaperMatrix::TaperMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  require_symmetric(entries_, "TaperMatrix");
  diag_min_ = entries_.diagonal().minCoeff();
  if (!(diag_min_ > 0.0)) {
    throw ContractError("TaperMatrix: diagonal entries must be positive");
  }
  const double lambda1 = symmetric_eigenvalues(entries_)(0);
  if (lambda1 < -1e-10) {
    throw ContractError("TaperMatrix: not positive semi-definite (lambda_1 = " +
                        std::to_string(lambda1) + ")");
  }
}

TaperMatrix wendland_taper(const Design &design, double range) {
  if (!(range > 0.0)) {
    throw ParameterError("taper range must be positive");
  }
  if (design.d() > 3) {
    throw ParameterError("wendland taper is only positive definite for d <= 3");
  }
  std::vector<const Point *> points;
  for (const auto &process : design.processes()) {
    for (const auto &point : process) {
      points.push_back(&point);
    }
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t c = 0; c < points[i]->size(); ++c) {
        const double diff = (*points[i])[c] - (*points[j])[c];
        sum += diff * diff;
      }
      const double t = std::sqrt(sum) / range;
      const double value = t < 1.0 ? std::pow(1.0 - t, 4) * (4.0 * t + 1.0) : 0.0;
      a(i, j) = value;
      a(j, i) = value;
    }
  }
  return TaperMatrix(std::move(a));
}

Eigen::MatrixXd schur_product(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("schur_product: shape mismatch");
  }
  return a.cwiseProduct(b);
}

double taper_floor(double sigma_lambda1, const TaperMatrix &taper) {
  if (!(sigma_lambda1 >= 0.0)) {
    throw ContractError("taper_floor: lambda_1(Sigma) must be non-negative");
  }
  return taper.diag_min() * sigma_lambda1;
}

void write_matrix_csv(std::ostream &out, const Eigen::MatrixXd &matrix) {
  char buffer[32];
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", matrix(i, j));
      out << (j ? "," : "") << buffer;
    }
    out << '\n';
  }
}

} // namespace specfloor
