#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace specfloor {

enum class CovKind { matern, exponential, gaussian, triangular };

std::string to_string(CovKind kind);
CovKind cov_kind_from_string(const std::string &name);

/*
 * Stationary isotropic covariance rho(t) of Euclidean distance t:
 *
 *   matern       s2 2^(1-nu)/Gamma(nu) (t/r)^nu K_nu(t/r)
 *   exponential  s2 exp(-t/r)
 *   gaussian     s2 exp(-(t/r)^2)
 *   triangular   s2 (1 - t/r) for t <= r, 0 beyond   (valid in d = 1 only)
 *
 * Spectral densities use the transform (2 pi)^-d \int g(x) exp(-i f.x) dx.
 */
class IsotropicCovariance {
public:
  IsotropicCovariance(CovKind kind, double variance, double range,
                      double smoothness);

  CovKind kind() const { return kind_; }
  double variance() const { return variance_; }
  double range() const { return range_; }
  // Matern nu; 0.5 for exponential, unused by the other kinds.
  double smoothness() const { return smoothness_; }

  double operator()(double distance) const;

  // Closed-form spectral density at Euclidean frequency norm `freq` in
  // dimension d.
  double spectral_density(double freq, int d) const;

  // Smallest A with |rho(t)| <= A / (1 + t^(d + tau)) for all t >= 0,
  // located numerically.
  double envelope_constant(int d, double tau) const;

  bool valid_in_dimension(int d) const;

  IsotropicCovariance with_variance(double variance) const;

  bool operator==(const IsotropicCovariance &) const = default;

private:
  CovKind kind_;
  double variance_;
  double range_;
  double smoothness_;
};

// Throws ParameterError on variance < 0, range <= 0 or (for Matern)
// smoothness <= 0.
IsotropicCovariance make_isotropic(CovKind kind, double variance, double range,
                                   double smoothness = 0.5);

struct LmcComponent {
  Eigen::MatrixXd coregionalization; // p x q, contributes A A^T
  IsotropicCovariance latent;
};

// Linear model of coregionalization C(h) = sum_r A_r A_r^T rho_r(|h|).
// Immutable; all evaluators are const and thread-safe.
class MatrixCovarianceModel {
public:
  MatrixCovarianceModel(std::vector<LmcComponent> components, int d);

  std::size_t p() const { return p_; }
  int d() const { return d_; }
  const std::vector<LmcComponent> &components() const { return components_; }
  // Decay envelope |c_kl(x)| <= decay_A / (1 + |x|_max^(d + decay_tau)).
  double decay_A() const { return decay_A_; }
  double decay_tau() const { return decay_tau_; }

  // c_kl(lag); k and l are zero-based. Throws IndexError / ShapeError.
  double eval(std::size_t k, std::size_t l, std::span<const double> lag) const;
  // C(lag) as a p x p matrix.
  Eigen::MatrixXd at(std::span<const double> lag) const;
  // Spectral density matrix sum_r A_r A_r^T rho_hat_r(|f|); real symmetric.
  Eigen::MatrixXd spectral(std::span<const double> frequency) const;

  // A_r A_r^T for each component.
  const std::vector<Eigen::MatrixXd> &component_weights() const {
    return weights_;
  }

  // Copy with explicit decay constants.
  MatrixCovarianceModel with_decay(double A, double tau) const;
  // Copy with every latent variance multiplied by `factor`.
  MatrixCovarianceModel scaled(double factor) const;

  std::string describe() const;

private:
  std::vector<LmcComponent> components_;
  std::vector<Eigen::MatrixXd> weights_;
  std::size_t p_;
  int d_;
  double decay_A_;
  double decay_tau_;
};

// Throws ShapeError when the components disagree on p or are empty, and
// ParameterError for latents invalid in dimension d.
MatrixCovarianceModel make_lmc(std::vector<LmcComponent> components, int d);

// Outcome of a sampled check. `pass` is false if any sample violates it.
struct AuditReport {
  bool pass = true;
  // Smallest (bound - |value|) seen; negative on failure.
  double worst_margin = 0.0;
  std::vector<double> worst_lag;
  std::size_t worst_k = 0;
  std::size_t worst_l = 0;
  std::size_t samples = 0;
  std::size_t failures = 0;
};

// Checks |c_kl(x)| <= decay_A / (1 + |x|_max^(d + tau)) at every sample.
AuditReport decay_audit(const MatrixCovarianceModel &model,
                        std::span<const std::vector<double>> lag_samples);

// `count` lags on [0, max_lag] along each coordinate axis and the main
// diagonal (a single axis when d = 1).
std::vector<std::vector<double>> radial_lag_samples(int d, double max_lag,
                                                    std::size_t count);

double max_norm(std::span<const double> x);
double euclidean_norm(std::span<const double> x);

} // namespace specfloor
