#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "specfloor/covmodels.hpp"

namespace specfloor {

// Value of the spectral density matrix at one frequency.
struct SpectralMatrix {
  std::vector<double> frequency;
  Eigen::MatrixXcd entries;

  double smallest_eigenvalue() const;
  // max |entries(k, l) - conj(entries(l, k))|
  double hermitian_defect() const;
};

SpectralMatrix spectral_matrix(const MatrixCovarianceModel &model,
                               std::span<const double> frequency);

// Smallest eigenvalue of the (real symmetric) LMC spectral matrix.
double spectral_lambda1(const MatrixCovarianceModel &model,
                        std::span<const double> frequency);

// Truncated forward transform over [-radius, radius]^d.
struct FourierQuadrature {
  double radius = 40.0;
  // Panel width along each axis; 0 picks one from the frequency.
  double panel_width = 0.0;
  std::size_t nodes_per_panel = 16;
};

// (2 pi)^-d \int_{[-R, R]^d} c_kl(x) exp(-i f.x) dx by tensor-product
// Gauss-Legendre panels. Throws PreconditionError when the model fails its
// own decay audit.
std::complex<double> numeric_fourier_oracle(const MatrixCovarianceModel &model,
                                            std::size_t k, std::size_t l,
                                            std::span<const double> frequency,
                                            const FourierQuadrature &quad);

// Radius beyond which the decay envelope contributes less than
// tol / 10 to the transform.
double envelope_truncation_radius(const MatrixCovarianceModel &model, double tol);

struct FrequencyBox {
  std::vector<double> lower;
  std::vector<double> upper;

  static FrequencyBox symmetric(int d, double half_width);
  std::size_t dimension() const { return lower.size(); }
  bool contains(std::span<const double> f) const;
};

struct SpectralFloor {
  FrequencyBox box;
  double value = 0.0;
  std::vector<double> argmin;
  double grid_step = 0.0;
  std::size_t resolution = 0;
};

// Minimum of lambda_1(C_hat(f)) over a uniform grid with `resolution` nodes
// per axis, followed by one local refinement (cyclic Brent line searches)
// inside the grid cell around the grid argmin.
SpectralFloor spectral_floor(const MatrixCovarianceModel &model,
                             const FrequencyBox &box, std::size_t resolution);

struct InversionQuadrature {
  // Truncation cutoffs F_0 2^j, j < levels, combined by Richardson
  // extrapolation in 1/F. Zero selects a default for the dimension.
  double base_cutoff = 0.0;
  std::size_t levels = 0;
  double panel_width = 0.0;
  std::size_t nodes_per_panel = 16;
};

// \int c_hat_kl(f) exp(i f.x) df evaluated numerically.
double inverse_transform(const MatrixCovarianceModel &model, std::size_t k,
                         std::size_t l, std::span<const double> lag,
                         const InversionQuadrature &quad = {});

// Passes iff |c_kl(x) - \int c_hat_kl(f) exp(i f.x) df| <= tol at every lag
// and entry. worst_margin is tol minus the largest discrepancy.
AuditReport inversion_audit(const MatrixCovarianceModel &model,
                            std::span<const std::vector<double>> lags, double tol,
                            const InversionQuadrature &quad = {});

} // namespace specfloor
