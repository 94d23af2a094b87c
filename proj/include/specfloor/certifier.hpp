#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specfloor/covmodels.hpp"
#include "specfloor/designs.hpp"
#include "specfloor/spectral.hpp"
#include "specfloor/window.hpp"

namespace specfloor {

enum class CertifyMode { design_certified, family_certified };

std::string to_string(CertifyMode mode);

// Scale ladder delta_m = 2^m / reference, m = -2, -1, 0, ...
double ladder_delta(double reference_distance, int rung);

// Distance defining the ladder: the overall minimum distance, or 1 when no
// process has two points.
double ladder_reference(const MinDistanceReport &report);

// max over processes k and rows i of sum_{j != i} |h(delta (x_i - x_j))|.
// Pairs whose scaled lag leaves the profile table are charged the table's
// tail bound.
double worst_row_sum(const Window &window, const Design &design, double delta);

struct DeltaChoice {
  double delta = 0.0;
  double row_sum_worst = 0.0;
  int rung = 0;
};

// First rung whose worst row sum is <= h(0) / 2. Throws CertificationFailure
// after `max_doublings` rungs.
DeltaChoice find_delta(const Window &window, const Design &design,
                       int max_doublings = 40);

// [h(delta (x_i - x_j))] for process k.
Eigen::MatrixXd comparison_block(const Window &window, const Design &design,
                                 std::size_t k, double delta);

// Block-diagonal T with the comparison blocks on its diagonal.
Eigen::MatrixXd comparison_matrix(const Window &window, const Design &design,
                                  double delta);

struct Delta2Result {
  double delta2 = 0.0;
  SpectralFloor floor;
};

// Spectral floor over [-delta r, delta r]^d divided by sup h_hat. Throws
// CertificationFailure when the floor is <= 1e-12.
Delta2Result compute_delta2(const Window &window, const MatrixCovarianceModel &model,
                            double delta, std::size_t resolution);

// Fitted |g(t)| <= scale / (1 + |t|^exponent), checked on a dense sample.
struct DecayEnvelope {
  double scale = 0.0;
  double exponent = 0.0;
  double fitted_up_to = 0.0;
  std::size_t validation_samples = 0;
};

// Fits the envelope on [0, table limit] and validates it on an offset grid.
// Throws ContractError for exponent < d + 2 or a failed validation.
DecayEnvelope fit_profile_envelope(const Window &window, double exponent);

// Packing bound on every within-process row sum for any design with
// minimum max-norm distance `min_distance`:
//   sum_m [(2m+2)^d - (2m)^d] g(0)^(d-1) B / (1 + (delta m Delta)^q).
double packing_row_sum_bound(const Window &window, double min_distance,
                             const DecayEnvelope &envelope, double delta);

// First ladder rung (reference = min_distance) whose packing bound is
// <= h(0) / 2.
double family_delta(const Window &window, double min_distance,
                    const DecayEnvelope &envelope, int max_doublings = 40);

struct CertifyOptions {
  CertifyMode mode = CertifyMode::design_certified;
  double support_radius = 1.0;
  // Grid nodes per axis for spectral floors; 0 picks 2001 (d = 1) or
  // 201 (d >= 2).
  std::size_t spectral_resolution = 0;
  // Extra ladder rungs scanned above the first valid one.
  int extra_rungs = 4;
  int max_doublings = 40;
  double envelope_exponent = 0.0; // 0 selects d + 2
  // Inversion audit inside certify is opt-in.
  bool audit_inversion = false;
  double inversion_tol = 1e-6;

  std::size_t resolution_for(int d) const;
};

struct CertifiedBound {
  double value = 0.0;
  double h0 = 0.0;
  double delta = 0.0;
  double delta2 = 0.0;
  int d = 1;
  int rung = 0;
  std::size_t spectral_grid_resolution = 0;
  double row_sum_worst = 0.0;
  CertifyMode mode = CertifyMode::design_certified;
  double support_radius = 1.0;
  double hhat_max = 0.0;
  double spectral_floor = 0.0;
  std::vector<double> spectral_argmin;
  double min_distance = 0.0;
  std::optional<DecayEnvelope> envelope;
  std::string window_profile;
  // Documented departures and trust caveats carried with the number.
  std::vector<std::string> deviations;
};

// (h0 / 2) delta^d delta2.
double bound_value(double h0, double delta, int d, double delta2);

// Runs the decay and min-distance audits, selects delta, evaluates delta2
// on the first valid rung and up to `extra_rungs` more rungs, and returns the
// largest bound.
CertifiedBound certify(const MatrixCovarianceModel &model, const Design &design,
                       const CertifyOptions &options = {});

using ModelFamily = std::function<MatrixCovarianceModel(std::span<const double>)>;

// One bound valid for every theta in the grid: shared delta, delta2 from the
// minimum of the per-theta spectral floors.
CertifiedBound certify_uniform(const ModelFamily &family,
                               const std::vector<std::vector<double>> &theta_grid,
                               const Design &design, const CertifyOptions &options = {});

// Default lag samples used by the decay audit inside certify.
std::vector<std::vector<double>> certify_lag_samples(const MatrixCovarianceModel &model);

} // namespace specfloor
