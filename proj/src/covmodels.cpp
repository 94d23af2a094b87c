#include "specfloor/covmodels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "specfloor/errors.hpp"

namespace specfloor {

namespace {

bool is_half_integer(double nu, double target) {
  return std::abs(nu - target) < 1e-14;
}

// Unit-variance Matern correlation of x = t / range.
double matern_correlation(double x, double nu) {
  if (x <= 0.0) {
    return 1.0;
  }
  if (is_half_integer(nu, 0.5)) {
    return std::exp(-x);
  }
  if (is_half_integer(nu, 1.5)) {
    return (1.0 + x) * std::exp(-x);
  }
  if (is_half_integer(nu, 2.5)) {
    return (1.0 + x + x * x / 3.0) * std::exp(-x);
  }
  if (x > 700.0) {
    return 0.0;
  }
  const double log_scale =
      (1.0 - nu) * std::numbers::ln2 - std::lgamma(nu) + nu * std::log(x);
  return std::exp(log_scale) * std::cyl_bessel_k(nu, x);
}

double sinc(double x) {
  if (std::abs(x) < 1e-8) {
    return 1.0 - x * x / 6.0;
  }
  return std::sin(x) / x;
}

} // namespace

std::string to_string(CovKind kind) {
  switch (kind) {
  case CovKind::matern:
    return "matern";
  case CovKind::exponential:
    return "exponential";
  case CovKind::gaussian:
    return "gaussian";
  case CovKind::triangular:
    return "triangular";
  }
  return "unknown";
}

CovKind cov_kind_from_string(const std::string &name) {
  if (name == "matern") {
    return CovKind::matern;
  }
  if (name == "exponential") {
    return CovKind::exponential;
  }
  if (name == "gaussian") {
    return CovKind::gaussian;
  }
  if (name == "triangular") {
    return CovKind::triangular;
  }
  throw ParameterError("unknown covariance kind '" + name + "'");
}

IsotropicCovariance::IsotropicCovariance(CovKind kind, double variance,
                                         double range, double smoothness)
    : kind_(kind), variance_(variance), range_(range),
      smoothness_(kind == CovKind::exponential ? 0.5 : smoothness) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw ParameterError("covariance variance must be finite and >= 0");
  }
  if (!(range > 0.0) || !std::isfinite(range)) {
    throw ParameterError("covariance range must be finite and > 0");
  }
  if (kind == CovKind::matern && !(smoothness > 0.0)) {
    throw ParameterError("matern smoothness must be > 0");
  }
}

double IsotropicCovariance::operator()(double distance) const {
  const double t = std::abs(distance);
  switch (kind_) {
  case CovKind::matern:
  case CovKind::exponential:
    return variance_ * matern_correlation(t / range_, smoothness_);
  case CovKind::gaussian: {
    const double x = t / range_;
    return variance_ * std::exp(-x * x);
  }
  case CovKind::triangular:
    return t <= range_ ? variance_ * (1.0 - t / range_) : 0.0;
  }
  return 0.0;
}

double IsotropicCovariance::spectral_density(double freq, int d) const {
  const double f = std::abs(freq);
  const double dd = static_cast<double>(d);
  switch (kind_) {
  case CovKind::matern:
  case CovKind::exponential: {
    const double nu = smoothness_;
    const double alpha = 1.0 / range_;
    const double log_coef = std::lgamma(nu + 0.5 * dd) + 2.0 * nu * std::log(alpha) -
                            0.5 * dd * std::log(std::numbers::pi) - std::lgamma(nu);
    return variance_ * std::exp(log_coef) *
           std::pow(alpha * alpha + f * f, -(nu + 0.5 * dd));
  }
  case CovKind::gaussian: {
    const double scale = range_ / (2.0 * std::sqrt(std::numbers::pi));
    return variance_ * std::pow(scale, dd) *
           std::exp(-range_ * range_ * f * f / 4.0);
  }
  case CovKind::triangular: {
    const double s = sinc(f * range_ / 2.0);
    return variance_ * range_ * s * s / (2.0 * std::numbers::pi);
  }
  }
  return 0.0;
}

double IsotropicCovariance::envelope_constant(int d, double tau) const {
  const double exponent = static_cast<double>(d) + tau;
  auto scaled = [&](double t) {
    return std::abs((*this)(t)) * (1.0 + std::pow(t, exponent));
  };
  double upper = 0.0;
  switch (kind_) {
  case CovKind::triangular:
    upper = range_;
    break;
  case CovKind::gaussian:
    upper = range_ * (10.0 + std::sqrt(exponent) * 4.0);
    break;
  default:
    upper = range_ * (80.0 + 4.0 * exponent + 4.0 * smoothness_);
    break;
  }
  constexpr int samples = 20000;
  const double step = upper / samples;
  double best = scaled(0.0);
  int best_index = 0;
  for (int i = 1; i <= samples; ++i) {
    const double value = scaled(step * i);
    if (value > best) {
      best = value;
      best_index = i;
    }
  }
  const double lo = std::max(0.0, step * (best_index - 1));
  const double hi = std::min(upper, step * (best_index + 1));
  const auto refined = boost::math::tools::brent_find_minima(
      [&](double t) { return -scaled(t); }, lo, hi, 50);
  best = std::max(best, -refined.second);
  // Relative slack for the sampled supremum.
  return best * (1.0 + 1e-6);
}

bool IsotropicCovariance::valid_in_dimension(int d) const {
  return kind_ != CovKind::triangular || d == 1;
}

IsotropicCovariance IsotropicCovariance::with_variance(double variance) const {
  return IsotropicCovariance(kind_, variance, range_, smoothness_);
}

IsotropicCovariance make_isotropic(CovKind kind, double variance, double range,
                                   double smoothness) {
  return IsotropicCovariance(kind, variance, range, smoothness);
}

MatrixCovarianceModel::MatrixCovarianceModel(std::vector<LmcComponent> components,
                                             int d)
    : components_(std::move(components)), p_(0), d_(d), decay_A_(0.0),
      decay_tau_(1.0) {
  if (d <= 0) {
    throw ParameterError("model dimension d must be positive");
  }
  if (components_.empty()) {
    throw ShapeError("linear model of coregionalization needs a component");
  }
  p_ = static_cast<std::size_t>(components_.front().coregionalization.rows());
  if (p_ == 0) {
    throw ShapeError("coregionalization matrix has no rows");
  }
  for (std::size_t r = 0; r < components_.size(); ++r) {
    const auto &component = components_[r];
    if (static_cast<std::size_t>(component.coregionalization.rows()) != p_ ||
        component.coregionalization.cols() == 0) {
      throw ShapeError("component " + std::to_string(r) +
                       " coregionalization has " +
                       std::to_string(component.coregionalization.rows()) +
                       " rows, expected p = " + std::to_string(p_));
    }
    if (!component.coregionalization.allFinite()) {
      throw ParameterError("coregionalization entries must be finite");
    }
    if (!component.latent.valid_in_dimension(d)) {
      throw ParameterError(to_string(component.latent.kind()) +
                           " covariance is not valid in dimension " +
                           std::to_string(d));
    }
    weights_.push_back(component.coregionalization *
                       component.coregionalization.transpose());
  }

  // Sum of component envelopes, all with tau = 1.
  Eigen::MatrixXd envelope = Eigen::MatrixXd::Zero(p_, p_);
  for (std::size_t r = 0; r < components_.size(); ++r) {
    envelope += weights_[r].cwiseAbs() *
                components_[r].latent.envelope_constant(d_, decay_tau_);
  }
  decay_A_ = envelope.maxCoeff();
  if (!(decay_A_ > 0.0)) {
    // All-zero model: any positive constant bounds it.
    decay_A_ = std::numeric_limits<double>::min();
  }
}

double MatrixCovarianceModel::eval(std::size_t k, std::size_t l,
                                   std::span<const double> lag) const {
  if (k >= p_ || l >= p_) {
    throw IndexError("covariance index (" + std::to_string(k) + ", " +
                     std::to_string(l) + ") out of range for p = " +
                     std::to_string(p_));
  }
  if (lag.size() != static_cast<std::size_t>(d_)) {
    throw ShapeError("lag has dimension " + std::to_string(lag.size()) +
                     ", model has d = " + std::to_string(d_));
  }
  const double distance = euclidean_norm(lag);
  double value = 0.0;
  for (std::size_t r = 0; r < components_.size(); ++r) {
    value += weights_[r](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) *
             components_[r].latent(distance);
  }
  return value;
}

Eigen::MatrixXd MatrixCovarianceModel::at(std::span<const double> lag) const {
  if (lag.size() != static_cast<std::size_t>(d_)) {
    throw ShapeError("lag dimension does not match model");
  }
  const double distance = euclidean_norm(lag);
  Eigen::MatrixXd result = Eigen::MatrixXd::Zero(p_, p_);
  for (std::size_t r = 0; r < components_.size(); ++r) {
    result += weights_[r] * components_[r].latent(distance);
  }
  return result;
}

Eigen::MatrixXd MatrixCovarianceModel::spectral(
    std::span<const double> frequency) const {
  if (frequency.size() != static_cast<std::size_t>(d_)) {
    throw ShapeError("frequency dimension does not match model");
  }
  const double f = euclidean_norm(frequency);
  Eigen::MatrixXd result = Eigen::MatrixXd::Zero(p_, p_);
  for (std::size_t r = 0; r < components_.size(); ++r) {
    result += weights_[r] * components_[r].latent.spectral_density(f, d_);
  }
  return result;
}

MatrixCovarianceModel MatrixCovarianceModel::with_decay(double A,
                                                        double tau) const {
  if (!(A > 0.0) || !(tau > 0.0)) {
    throw ParameterError("decay constants A and tau must be positive");
  }
  MatrixCovarianceModel copy = *this;
  copy.decay_A_ = A;
  copy.decay_tau_ = tau;
  return copy;
}

MatrixCovarianceModel MatrixCovarianceModel::scaled(double factor) const {
  if (!(factor > 0.0)) {
    throw ParameterError("variance scale factor must be positive");
  }
  std::vector<LmcComponent> components = components_;
  for (auto &component : components) {
    component.latent = component.latent.with_variance(component.latent.variance() * factor);
  }
  MatrixCovarianceModel copy(std::move(components), d_);
  copy.decay_A_ = decay_A_ * factor;
  copy.decay_tau_ = decay_tau_;
  return copy;
}

std::string MatrixCovarianceModel::describe() const {
  std::ostringstream out;
  out << "lmc(p=" << p_ << ", d=" << d_ << ", components=[";
  for (std::size_t r = 0; r < components_.size(); ++r) {
    const auto &latent = components_[r].latent;
    out << (r ? ", " : "") << to_string(latent.kind()) << "(var=" << latent.variance()
        << ", range=" << latent.range();
    if (latent.kind() == CovKind::matern) {
      out << ", nu=" << latent.smoothness();
    }
    out << ")";
  }
  out << "])";
  return out.str();
}

MatrixCovarianceModel make_lmc(std::vector<LmcComponent> components, int d) {
  return MatrixCovarianceModel(std::move(components), d);
}

AuditReport decay_audit(const MatrixCovarianceModel &model,
                        std::span<const std::vector<double>> lag_samples) {
  AuditReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  const double exponent = model.d() + model.decay_tau();
  for (const auto &lag : lag_samples) {
    const double bound = model.decay_A() / (1.0 + std::pow(max_norm(lag), exponent));
    const Eigen::MatrixXd values = model.at(lag);
    for (std::size_t k = 0; k < model.p(); ++k) {
      for (std::size_t l = 0; l < model.p(); ++l) {
        const double margin =
            bound - std::abs(values(static_cast<Eigen::Index>(k),
                                    static_cast<Eigen::Index>(l)));
        ++report.samples;
        if (margin < 0.0) {
          ++report.failures;
        }
        if (margin < report.worst_margin) {
          report.worst_margin = margin;
          report.worst_lag = lag;
          report.worst_k = k;
          report.worst_l = l;
        }
      }
    }
  }
  report.pass = report.failures == 0;
  return report;
}

std::vector<std::vector<double>> radial_lag_samples(int d, double max_lag,
                                                    std::size_t count) {
  if (d <= 0 || count < 2 || !(max_lag > 0.0)) {
    throw ParameterError("radial_lag_samples: need d > 0, count >= 2, max_lag > 0");
  }
  const auto dim = static_cast<std::size_t>(d);
  std::vector<std::vector<double>> directions;
  for (std::size_t axis = 0; axis < dim; ++axis) {
    std::vector<double> e(dim, 0.0);
    e[axis] = 1.0;
    directions.push_back(std::move(e));
  }
  if (d > 1) {
    directions.emplace_back(dim, 1.0);
  }
  std::vector<std::vector<double>> lags;
  lags.reserve(directions.size() * count);
  for (const auto &direction : directions) {
    for (std::size_t i = 0; i < count; ++i) {
      const double t = max_lag * static_cast<double>(i) / static_cast<double>(count - 1);
      std::vector<double> lag(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        lag[j] = t * direction[j];
      }
      lags.push_back(std::move(lag));
    }
  }
  return lags;
}

double max_norm(std::span<const double> x) {
  double value = 0.0;
  for (double xi : x) {
    value = std::max(value, std::abs(xi));
  }
  return value;
}

double euclidean_norm(std::span<const double> x) {
  double sum = 0.0;
  for (double xi : x) {
    sum += xi * xi;
  }
  return std::sqrt(sum);
}

} // namespace specfloor
