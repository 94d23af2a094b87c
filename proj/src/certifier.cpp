#include "specfloor/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specfloor/errors.hpp"
#include "specfloor/parallel.hpp"

namespace specfloor {

namespace {

constexpr double kFloorThreshold = 1e-12;
constexpr int kFirstRung = -2;

std::string format_vector(std::span<const double> v) {
  std::ostringstream out;
  out.precision(6);
  out << "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << (i ? ", " : "") << v[i];
  }
  out << ")";
  return out.str();
}

double max_latent_range(const MatrixCovarianceModel &model) {
  double range = 0.0;
  for (const auto &component : model.components()) {
    range = std::max(range, component.latent.range());
  }
  return range;
}

std::vector<std::string> standard_deviations(CertifyMode mode) {
  std::vector<std::string> notes{
      "window support is the symmetric box [-r, r]^d so that h is real and even",
      "delta2 uses sup h_hat = bump(0)^d instead of the pointwise ratio",
      "spectral floor is a grid minimum with one local refinement; zeros between "
      "grid nodes narrower than the refinement can be missed",
      "covariance lags use the Euclidean norm; distances, envelopes and packing use "
      "the max norm"};
  if (mode == CertifyMode::family_certified) {
    notes.emplace_back("family mode rests on a decay envelope for g fitted and validated "
                       "by sampling, not proved analytically");
  }
  return notes;
}

void audit_decay_or_throw(const MatrixCovarianceModel &model) {
  const auto samples = certify_lag_samples(model);
  const AuditReport decay = decay_audit(model, samples);
  if (!decay.pass) {
    std::ostringstream what;
    what << "Assumption 1: decay envelope violated for c_" << decay.worst_k + 1
         << decay.worst_l + 1 << " at lag " << format_vector(decay.worst_lag)
         << " (margin " << decay.worst_margin << ")";
    throw CertificationFailure(FailureStage::decay, what.str(), decay.worst_lag);
  }
}

void audit_inversion_or_throw(const MatrixCovarianceModel &model, double tol) {
  std::vector<std::vector<double>> lags;
  for (double t : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    std::vector<double> lag(static_cast<std::size_t>(model.d()), 0.0);
    lag[0] = t;
    lags.push_back(std::move(lag));
  }
  const AuditReport report = inversion_audit(model, lags, tol);
  if (!report.pass) {
    std::ostringstream what;
    what << "Assumption 2: Fourier inversion misses c_" << report.worst_k + 1
         << report.worst_l + 1 << " at lag " << format_vector(report.worst_lag)
         << " by more than " << tol;
    throw CertificationFailure(FailureStage::spectral, what.str(), report.worst_lag);
  }
}

MinDistanceReport audit_min_distance_or_throw(const Design &design) {
  try {
    return min_distance(design);
  } catch (const ZeroDistanceError &error) {
    throw CertificationFailure(FailureStage::min_distance,
                               std::string("Assumption 3: ") + error.what());
  }
}

void check_shapes(const MatrixCovarianceModel &model, const Design &design) {
  if (model.p() != design.process_count() || model.d() != design.d()) {
    throw ShapeError("model (p = " + std::to_string(model.p()) +
                     ", d = " + std::to_string(model.d()) + ") does not match design (p = " +
                     std::to_string(design.process_count()) +
                     ", d = " + std::to_string(design.d()) + ")");
  }
}

// One rung of the scale ladder with its worst row sum.
struct Rung {
  int index;
  double delta;
  double row_sum;
};

// Candidate rungs: the first valid one and up to `extra` further rungs
// whose row sums also pass.
std::vector<Rung> candidate_rungs(const Window &window, const Design &design,
                                  const MinDistanceReport &distances,
                                  const CertifyOptions &options,
                                  std::optional<DecayEnvelope> &envelope) {
  const double half_h0 = 0.5 * window.h0();
  const double reference = ladder_reference(distances);
  std::vector<Rung> rungs;
  if (options.mode == CertifyMode::design_certified) {
    const DeltaChoice first = find_delta(window, design, options.max_doublings);
    rungs.push_back({first.rung, first.delta, first.row_sum_worst});
    for (int extra = 1; extra <= options.extra_rungs; ++extra) {
      const int index = first.rung + extra;
      const double delta = ladder_delta(reference, index);
      const double sum = worst_row_sum(window, design, delta);
      if (sum <= half_h0) {
        rungs.push_back({index, delta, sum});
      }
    }
  } else {
    const double exponent = options.envelope_exponent > 0.0
                                ? options.envelope_exponent
                                : static_cast<double>(window.d() + 2);
    envelope = fit_profile_envelope(window, exponent);
    const double delta =
        family_delta(window, reference, *envelope, options.max_doublings);
    const int first =
        static_cast<int>(std::lround(std::log2(delta * reference)));
    for (int extra = 0; extra <= options.extra_rungs; ++extra) {
      const double d = ladder_delta(reference, first + extra);
      rungs.push_back(
          {first + extra, d, packing_row_sum_bound(window, reference, *envelope, d)});
    }
  }
  return rungs;
}

CertifiedBound make_certificate(const Window &window, const Rung &rung,
                                const SpectralFloor &floor, double delta2,
                                const CertifyOptions &options, double reference,
                                const std::optional<DecayEnvelope> &envelope) {
  CertifiedBound bound;
  bound.h0 = window.h0();
  bound.delta = rung.delta;
  bound.delta2 = delta2;
  bound.d = window.d();
  bound.rung = rung.index;
  bound.value = bound_value(bound.h0, bound.delta, bound.d, bound.delta2);
  bound.spectral_grid_resolution = floor.resolution;
  bound.row_sum_worst = rung.row_sum;
  bound.mode = options.mode;
  bound.support_radius = window.support_radius();
  bound.hhat_max = window.hhat_max();
  bound.spectral_floor = floor.value;
  bound.spectral_argmin = floor.argmin;
  bound.min_distance = reference;
  bound.envelope = envelope;
  bound.window_profile = window.profile_name();
  bound.deviations = standard_deviations(options.mode);
  return bound;
}

} // namespace

std::string to_string(CertifyMode mode) {
  return mode == CertifyMode::design_certified ? "design_certified" : "family_certified";
}

double ladder_delta(double reference_distance, int rung) {
  return std::ldexp(1.0, rung) / reference_distance;
}

double ladder_reference(const MinDistanceReport &report) {
  return MinDistanceReport::unconstrained(report.overall) ? 1.0 : report.overall;
}

double worst_row_sum(const Window &window, const Design &design, double delta) {
  const std::size_t n = design.total();
  const auto &offsets = design.offsets();
  const auto dim = static_cast<std::size_t>(design.d());
  const double limit = window.table_limit();
  const double tail_charge =
      window.profile_tail_bound() *
      std::pow(window.profile(0.0), static_cast<double>(window.d() - 1));

  std::vector<double> row_sums(n, 0.0);
  parallel_for(n, [&](std::size_t a) {
    const std::size_t k = static_cast<std::size_t>(
        std::upper_bound(offsets.begin(), offsets.end(), a) - offsets.begin() - 1);
    const auto &points = design.process(k);
    const std::size_t i = a - offsets[k];
    double sum = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) {
        continue;
      }
      double value = 1.0;
      bool beyond_table = false;
      for (std::size_t c = 0; c < dim; ++c) {
        const double t = delta * (points[i][c] - points[j][c]);
        if (std::abs(t) >= limit) {
          beyond_table = true;
          break;
        }
        value *= window.profile(t);
      }
      sum += beyond_table ? tail_charge : std::abs(value);
    }
    row_sums[a] = sum;
  });
  double worst = 0.0;
  for (double sum : row_sums) {
    worst = std::max(worst, sum);
  }
  return worst;
}

DeltaChoice find_delta(const Window &window, const Design &design, int max_doublings) {
  if (window.d() != design.d()) {
    throw ShapeError("window and design dimensions differ");
  }
  const double reference = ladder_reference(min_distance(design));
  const double half_h0 = 0.5 * window.h0();
  double last = std::numeric_limits<double>::infinity();
  for (int step = 0; step <= max_doublings; ++step) {
    const int rung = kFirstRung + step;
    const double delta = ladder_delta(reference, rung);
    const double sum = worst_row_sum(window, design, delta);
    if (sum <= half_h0) {
      return {delta, sum, rung};
    }
    last = sum;
  }
  std::ostringstream what;
  what << "row-sum condition not met after " << max_doublings
       << " doublings (worst row sum " << last << " > h(0)/2 = " << half_h0 << ")";
  throw CertificationFailure(FailureStage::row_sum, what.str());
}

Eigen::MatrixXd comparison_block(const Window &window, const Design &design,
                                 std::size_t k, double delta) {
  const auto &points = design.process(k);
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto dim = static_cast<std::size_t>(design.d());
  Eigen::MatrixXd block(n, n);
  std::vector<double> lag(dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      for (std::size_t c = 0; c < dim; ++c) {
        lag[c] = delta * (points[static_cast<std::size_t>(i)][c] -
                          points[static_cast<std::size_t>(j)][c]);
      }
      const double value = window(lag);
      block(i, j) = value;
      block(j, i) = value;
    }
  }
  return block;
}

Eigen::MatrixXd comparison_matrix(const Window &window, const Design &design,
                                  double delta) {
  const auto n = static_cast<Eigen::Index>(design.total());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < design.process_count(); ++k) {
    const auto start = static_cast<Eigen::Index>(design.offsets()[k]);
    const auto size = static_cast<Eigen::Index>(design.count(k));
    t.block(start, start, size, size) = comparison_block(window, design, k, delta);
  }
  return t;
}

Delta2Result compute_delta2(const Window &window, const MatrixCovarianceModel &model,
                            double delta, std::size_t resolution) {
  if (!(delta > 0.0)) {
    throw ParameterError("delta must be positive");
  }
  const FrequencyBox box =
      FrequencyBox::symmetric(model.d(), delta * window.support_radius());
  Delta2Result result;
  result.floor = spectral_floor(model, box, resolution);
  if (!(result.floor.value > kFloorThreshold)) {
    std::ostringstream what;
    what << "Assumption 2: spectral floor " << result.floor.value << " at f="
         << format_vector(result.floor.argmin) << " within [-" << delta * window.support_radius()
         << ", " << delta * window.support_radius() << "]^" << model.d();
    throw CertificationFailure(FailureStage::spectral, what.str(), result.floor.argmin);
  }
  result.delta2 = result.floor.value / window.hhat_max();
  return result;
}

DecayEnvelope fit_profile_envelope(const Window &window, double exponent) {
  if (!(exponent >= static_cast<double>(window.d()) + 2.0)) {
    throw ContractError("envelope exponent must be at least d + 2");
  }
  const double limit = window.table_limit();
  const double step = 0.01 / window.support_radius();
  auto weight = [&](double t) { return 1.0 + std::pow(t, exponent); };

  double scale = 0.0;
  for (double t = 0.0; t <= limit; t += step) {
    scale = std::max(scale, std::abs(window.profile(t)) * weight(t));
  }
  scale *= 1.01;

  DecayEnvelope envelope{scale, exponent, limit, 0};
  for (double t = 0.5 * step; t <= limit; t += step) {
    ++envelope.validation_samples;
    if (std::abs(window.profile(t)) > scale / weight(t)) {
      throw ContractError("profile envelope validation failed at t = " + std::to_string(t));
    }
  }
  return envelope;
}

double packing_row_sum_bound(const Window &window, double min_distance,
                             const DecayEnvelope &envelope, double delta) {
  if (!(min_distance > 0.0) || !(delta > 0.0)) {
    throw ParameterError("packing bound needs positive min_distance and delta");
  }
  const int d = window.d();
  const double q = envelope.exponent;
  const double amplitude =
      std::pow(window.profile(0.0), static_cast<double>(d - 1)) * envelope.scale;
  const double step = delta * min_distance;
  constexpr long terms = 1000000;
  double sum = 0.0;
  // Small terms first.
  for (long m = terms; m >= 1; --m) {
    const double md = static_cast<double>(m);
    const double shell = std::pow(2.0 * md + 2.0, d) - std::pow(2.0 * md, d);
    sum += shell * amplitude / (1.0 + std::pow(step * md, q));
  }
  // Tail m > M: w(m) <= 2d (3m)^(d-1) and the envelope <= B / (step m)^q.
  const double M = static_cast<double>(terms);
  const double tail = amplitude * 2.0 * d * std::pow(3.0, d - 1) * std::pow(step, -q) *
                      std::pow(M, d - q) / (q - d);
  return sum + tail;
}

double family_delta(const Window &window, double min_distance,
                    const DecayEnvelope &envelope, int max_doublings) {
  const double half_h0 = 0.5 * window.h0();
  for (int step = 0; step <= max_doublings; ++step) {
    const double delta = ladder_delta(min_distance, kFirstRung + step);
    if (packing_row_sum_bound(window, min_distance, envelope, delta) <= half_h0) {
      return delta;
    }
  }
  throw CertificationFailure(FailureStage::envelope,
                             "packing bound exceeds h(0)/2 on every ladder rung");
}

std::size_t CertifyOptions::resolution_for(int d) const {
  if (spectral_resolution > 0) {
    return spectral_resolution;
  }
  return d == 1 ? 2001 : 201;
}

double bound_value(double h0, double delta, int d, double delta2) {
  return 0.5 * h0 * std::pow(delta, d) * delta2;
}

std::vector<std::vector<double>> certify_lag_samples(const MatrixCovarianceModel &model) {
  return radial_lag_samples(model.d(), std::max(50.0, 20.0 * max_latent_range(model)), 400);
}

CertifiedBound certify(const MatrixCovarianceModel &model, const Design &design,
                       const CertifyOptions &options) {
  check_shapes(model, design);
  audit_decay_or_throw(model);
  const MinDistanceReport distances = audit_min_distance_or_throw(design);
  if (options.audit_inversion) {
    audit_inversion_or_throw(model, options.inversion_tol);
  }

  const Window window = build_window(model.d(), options.support_radius);
  std::optional<DecayEnvelope> envelope;
  const auto rungs = candidate_rungs(window, design, distances, options, envelope);
  const std::size_t resolution = options.resolution_for(model.d());

  std::optional<CertifiedBound> best;
  for (std::size_t i = 0; i < rungs.size(); ++i) {
    Delta2Result delta2;
    try {
      delta2 = compute_delta2(window, model, rungs[i].delta, resolution);
    } catch (const CertificationFailure &) {
      if (i == 0) {
        throw;
      }
      // Boxes are nested, so every later rung fails as well.
      break;
    }
    CertifiedBound candidate =
        make_certificate(window, rungs[i], delta2.floor, delta2.delta2, options,
                         ladder_reference(distances), envelope);
    if (!best || candidate.value > best->value) {
      best = std::move(candidate);
    }
  }
  return *best;
}

CertifiedBound certify_uniform(const ModelFamily &family,
                               const std::vector<std::vector<double>> &theta_grid,
                               const Design &design, const CertifyOptions &options) {
  if (theta_grid.empty()) {
    throw ParameterError("certify_uniform needs a non-empty parameter grid");
  }
  std::vector<MatrixCovarianceModel> models;
  models.reserve(theta_grid.size());
  double shared_A = 0.0;
  double shared_tau = std::numeric_limits<double>::infinity();
  for (const auto &theta : theta_grid) {
    try {
      models.push_back(family(theta));
    } catch (const Error &error) {
      CertificationFailure failure(FailureStage::decay,
                                   "theta " + format_vector(theta) +
                                       ": model construction failed: " + error.what());
      failure.set_theta(theta);
      throw failure;
    }
    check_shapes(models.back(), design);
    shared_A = std::max(shared_A, models.back().decay_A());
    shared_tau = std::min(shared_tau, models.back().decay_tau());
  }

  auto with_theta = [&](const CertificationFailure &failure, std::size_t index) {
    CertificationFailure named(failure.stage(),
                               "theta " + format_vector(theta_grid[index]) + ": " +
                                   failure.what(),
                               failure.location());
    named.set_theta(theta_grid[index]);
    return named;
  };

  for (std::size_t t = 0; t < models.size(); ++t) {
    models[t] = models[t].with_decay(shared_A, shared_tau);
    try {
      audit_decay_or_throw(models[t]);
      if (options.audit_inversion) {
        audit_inversion_or_throw(models[t], options.inversion_tol);
      }
    } catch (const CertificationFailure &failure) {
      throw with_theta(failure, t);
    }
  }
  const MinDistanceReport distances = audit_min_distance_or_throw(design);

  const Window window = build_window(design.d(), options.support_radius);
  std::optional<DecayEnvelope> envelope;
  const auto rungs = candidate_rungs(window, design, distances, options, envelope);
  const std::size_t resolution = options.resolution_for(design.d());

  std::optional<CertifiedBound> best;
  for (std::size_t i = 0; i < rungs.size(); ++i) {
    std::optional<Delta2Result> lowest;
    try {
      for (std::size_t t = 0; t < models.size(); ++t) {
        Delta2Result result;
        try {
          result = compute_delta2(window, models[t], rungs[i].delta, resolution);
        } catch (const CertificationFailure &failure) {
          throw with_theta(failure, t);
        }
        if (!lowest || result.delta2 < lowest->delta2) {
          lowest = std::move(result);
        }
      }
    } catch (const CertificationFailure &) {
      if (i == 0) {
        throw;
      }
      break;
    }
    CertifiedBound candidate =
        make_certificate(window, rungs[i], lowest->floor, lowest->delta2, options,
                         ladder_reference(distances), envelope);
    candidate.deviations.emplace_back(
        "uniform over " + std::to_string(theta_grid.size()) +
        " grid parameters; values between grid points are not covered");
    if (!best || candidate.value > best->value) {
      best = std::move(candidate);
    }
  }
  return *best;
}

} // namespace specfloor
