#include "specfloor/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "specfloor/errors.hpp"
#include "specfloor/parallel.hpp"
#include "specfloor/quadrature.hpp"

namespace specfloor {

namespace {

double symmetric_lambda1(const Eigen::MatrixXd &m) {
  if (m.rows() == 1) {
    return m(0, 0);
  }
  if (m.rows() == 2) {
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double half_gap = 0.5 * (m(0, 0) - m(1, 1));
    return mean - std::hypot(half_gap, m(0, 1));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

// Entry (k, l) of the spectral density matrix at Euclidean frequency norm f.
double spectral_entry(const MatrixCovarianceModel &model, std::size_t k,
                      std::size_t l, double f) {
  double value = 0.0;
  const auto &weights = model.component_weights();
  for (std::size_t r = 0; r < weights.size(); ++r) {
    const double w = weights[r](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
    if (w != 0.0) {
      value += w * model.components()[r].latent.spectral_density(f, model.d());
    }
  }
  return value;
}

void check_entry(const MatrixCovarianceModel &model, std::size_t k, std::size_t l) {
  if (k >= model.p() || l >= model.p()) {
    throw IndexError("spectral entry index out of range");
  }
}

// Nodes and weights of a piecewise rule along one axis.
struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

AxisRule axis_rule(std::vector<double> breakpoints, double max_width,
                   const GaussLegendreRule &rule) {
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());
  AxisRule axis;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    const auto panels =
        static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / max_width)));
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = a + width * (static_cast<double>(p) + 0.5);
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        axis.nodes.push_back(mid + 0.5 * width * rule.nodes[j]);
        axis.weights.push_back(0.5 * width * rule.weights[j]);
      }
    }
  }
  return axis;
}

// Sum over the tensor grid axis^d of weight * integrand(point).
template <typename Integrand>
auto tensor_sum(const AxisRule &axis, int d, Integrand &&integrand) {
  using Value = decltype(integrand(std::vector<double>{}));
  const std::size_t m = axis.nodes.size();
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    total *= m;
  }
  // Outer loop over the first coordinate, reduced in index order.
  std::vector<Value> partial(m, Value{});
  parallel_for(m, [&](std::size_t i0) {
    std::vector<double> point(static_cast<std::size_t>(d));
    const std::size_t inner = total / m;
    Value sum{};
    for (std::size_t rest = 0; rest < inner; ++rest) {
      std::size_t index = rest;
      double weight = axis.weights[i0];
      point[0] = axis.nodes[i0];
      for (int j = d - 1; j >= 1; --j) {
        const std::size_t ij = index % m;
        index /= m;
        point[static_cast<std::size_t>(j)] = axis.nodes[ij];
        weight *= axis.weights[ij];
      }
      sum += weight * integrand(point);
    }
    partial[i0] = sum;
  });
  Value total_sum{};
  for (const auto &value : partial) {
    total_sum += value;
  }
  return total_sum;
}

double max_latent_range(const MatrixCovarianceModel &model) {
  double range = 0.0;
  for (const auto &component : model.components()) {
    range = std::max(range, component.latent.range());
  }
  return range;
}

// Oscillation rate of the spectral densities in f (triangular: its range).
double spectral_oscillation(const MatrixCovarianceModel &model) {
  double rate = 0.0;
  for (const auto &component : model.components()) {
    if (component.latent.kind() == CovKind::triangular) {
      rate = std::max(rate, component.latent.range());
    }
  }
  return rate;
}

} // namespace

double SpectralMatrix::smallest_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries,
                                                         Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double SpectralMatrix::hermitian_defect() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

SpectralMatrix spectral_matrix(const MatrixCovarianceModel &model,
                               std::span<const double> frequency) {
  SpectralMatrix result;
  result.frequency.assign(frequency.begin(), frequency.end());
  result.entries = model.spectral(frequency).cast<std::complex<double>>();
  return result;
}

double spectral_lambda1(const MatrixCovarianceModel &model,
                        std::span<const double> frequency) {
  return symmetric_lambda1(model.spectral(frequency));
}

std::complex<double> numeric_fourier_oracle(const MatrixCovarianceModel &model,
                                            std::size_t k, std::size_t l,
                                            std::span<const double> frequency,
                                            const FourierQuadrature &quad) {
  check_entry(model, k, l);
  if (frequency.size() != static_cast<std::size_t>(model.d())) {
    throw ShapeError("frequency dimension does not match model");
  }
  if (!(quad.radius > 0.0) || quad.nodes_per_panel == 0) {
    throw ParameterError("fourier quadrature needs radius > 0 and nodes > 0");
  }
  const auto samples = radial_lag_samples(
      model.d(), std::max(quad.radius, 10.0 * max_latent_range(model)), 400);
  const AuditReport decay = decay_audit(model, samples);
  if (!decay.pass) {
    throw PreconditionError(
        "numeric_fourier_oracle: model fails its decay audit (worst margin " +
        std::to_string(decay.worst_margin) + ")");
  }

  const double R = quad.radius;
  double width = quad.panel_width;
  if (width <= 0.0) {
    const double omega = max_norm(frequency);
    width = std::min(0.5, 2.0 / (omega + 1.0));
  }
  std::vector<double> breakpoints{-R, 0.0, R};
  if (model.d() == 1) {
    // Kinks of compactly supported latents.
    for (const auto &component : model.components()) {
      if (component.latent.kind() == CovKind::triangular &&
          component.latent.range() < R) {
        breakpoints.push_back(component.latent.range());
        breakpoints.push_back(-component.latent.range());
      }
    }
  }
  const AxisRule axis =
      axis_rule(breakpoints, width, gauss_legendre(quad.nodes_per_panel));
  const int d = model.d();
  const std::complex<double> sum =
      tensor_sum(axis, d, [&](const std::vector<double> &x) {
        double phase = 0.0;
        for (int j = 0; j < d; ++j) {
          phase += frequency[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        }
        const double c = model.eval(k, l, x);
        return std::complex<double>(c * std::cos(phase), -c * std::sin(phase));
      });
  return sum * std::pow(2.0 * std::numbers::pi, -static_cast<double>(d));
}

double envelope_truncation_radius(const MatrixCovarianceModel &model, double tol) {
  if (!(tol > 0.0)) {
    throw ParameterError("tolerance must be positive");
  }
  const double d = model.d();
  const double tau = model.decay_tau();
  // Shell |x|_max = t has surface d 2^d t^(d-1); integrand <= A t^-(d+tau).
  const double scale = model.decay_A() * d * std::pow(2.0, d) /
                       (std::pow(2.0 * std::numbers::pi, d) * tau);
  return std::pow(10.0 * scale / tol, 1.0 / tau);
}

FrequencyBox FrequencyBox::symmetric(int d, double half_width) {
  if (d <= 0 || !(half_width > 0.0)) {
    throw ParameterError("frequency box needs d > 0 and half_width > 0");
  }
  const auto dim = static_cast<std::size_t>(d);
  return FrequencyBox{std::vector<double>(dim, -half_width),
                      std::vector<double>(dim, half_width)};
}

bool FrequencyBox::contains(std::span<const double> f) const {
  if (f.size() != lower.size()) {
    return false;
  }
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j] < lower[j] || f[j] > upper[j]) {
      return false;
    }
  }
  return true;
}

SpectralFloor spectral_floor(const MatrixCovarianceModel &model,
                             const FrequencyBox &box, std::size_t resolution) {
  const std::size_t d = box.dimension();
  if (d != static_cast<std::size_t>(model.d()) || box.upper.size() != d) {
    throw ShapeError("frequency box dimension does not match model");
  }
  if (resolution < 3) {
    throw ParameterError("spectral_floor needs at least 3 nodes per axis");
  }
  std::vector<double> step(d);
  double max_step = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (!(box.upper[j] >= box.lower[j])) {
      throw ParameterError("frequency box has upper < lower");
    }
    step[j] = (box.upper[j] - box.lower[j]) / static_cast<double>(resolution - 1);
    max_step = std::max(max_step, step[j]);
  }

  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) {
    total *= resolution;
  }
  auto node = [&](std::size_t index) {
    std::vector<double> f(d);
    for (std::size_t j = d; j-- > 0;) {
      const std::size_t ij = index % resolution;
      index /= resolution;
      f[j] = ij + 1 == resolution ? box.upper[j]
                                  : box.lower[j] + step[j] * static_cast<double>(ij);
    }
    return f;
  };

  // Rows of the grid along the last axis form the unit of parallel work.
  const std::size_t rows = total / resolution;
  std::vector<std::pair<double, std::size_t>> row_min(rows);
  parallel_for(rows, [&](std::size_t row) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = row * resolution;
    for (std::size_t i = 0; i < resolution; ++i) {
      const std::size_t index = row * resolution + i;
      const double value = spectral_lambda1(model, node(index));
      if (value < best) {
        best = value;
        best_index = index;
      }
    }
    row_min[row] = {best, best_index};
  });
  auto best = row_min.front();
  for (const auto &candidate : row_min) {
    if (candidate.first < best.first) {
      best = candidate;
    }
  }

  SpectralFloor floor;
  floor.box = box;
  floor.grid_step = max_step;
  floor.resolution = resolution;
  floor.value = best.first;
  floor.argmin = node(best.second);

  // Local refinement within one grid step of the argmin.
  std::vector<double> point = floor.argmin;
  const int cycles = d == 1 ? 1 : 3;
  for (int cycle = 0; cycle < cycles; ++cycle) {
    for (std::size_t j = 0; j < d; ++j) {
      const double lo = std::max(box.lower[j], floor.argmin[j] - step[j]);
      const double hi = std::min(box.upper[j], floor.argmin[j] + step[j]);
      if (!(hi > lo)) {
        continue;
      }
      std::vector<double> probe = point;
      const auto result = boost::math::tools::brent_find_minima(
          [&](double x) {
            probe[j] = x;
            return spectral_lambda1(model, probe);
          },
          lo, hi, 26);
      probe[j] = result.first;
      const double value = spectral_lambda1(model, probe);
      if (value < floor.value) {
        floor.value = value;
        point = probe;
      }
    }
  }
  floor.argmin = point;
  return floor;
}

double inverse_transform(const MatrixCovarianceModel &model, std::size_t k,
                         std::size_t l, std::span<const double> lag,
                         const InversionQuadrature &quad) {
  check_entry(model, k, l);
  const int d = model.d();
  if (lag.size() != static_cast<std::size_t>(d)) {
    throw ShapeError("lag dimension does not match model");
  }
  const double base = quad.base_cutoff > 0.0
                          ? quad.base_cutoff
                          : (d == 1 ? 64.0 : 16.0) * std::numbers::pi;
  const std::size_t levels = quad.levels > 0 ? quad.levels : (d == 1 ? 6 : 3);
  double width = quad.panel_width;
  if (width <= 0.0) {
    const double omega = max_norm(lag) + spectral_oscillation(model);
    // Resolve the narrowest spectral peak (width 1 / range) and the
    // oscillation of the integrand.
    width = std::min(d == 1 ? 0.5 : 1.0, 0.5 / max_latent_range(model));
    if (omega > 0.0) {
      width = std::min(width, 1.5 / omega);
    }
  }
  const GaussLegendreRule rule = gauss_legendre(quad.nodes_per_panel);

  // The densities are even in every coordinate, so the transform reduces to
  // 2^d \int_{[0, F]^d} c_hat(|f|) prod_j cos(f_j x_j) df.
  auto integrand = [&](const std::vector<double> &f) {
    double value = spectral_entry(model, k, l, euclidean_norm(f));
    for (int j = 0; j < d; ++j) {
      value *= std::cos(f[static_cast<std::size_t>(j)] * lag[static_cast<std::size_t>(j)]);
    }
    return value;
  };

  std::vector<double> estimates;
  estimates.reserve(levels);
  if (d == 1) {
    double running = 0.0;
    double previous = 0.0;
    for (std::size_t level = 0; level < levels; ++level) {
      const double cutoff = std::ldexp(base, static_cast<int>(level));
      const double bp[] = {previous, cutoff};
      running += piecewise_gauss_legendre(
          [&](double f) { return integrand(std::vector<double>{f}); }, bp, width,
          rule);
      previous = cutoff;
      estimates.push_back(2.0 * running);
    }
  } else {
    const double factor = std::pow(2.0, d);
    for (std::size_t level = 0; level < levels; ++level) {
      const double cutoff = std::ldexp(base, static_cast<int>(level));
      const AxisRule axis = axis_rule({0.0, cutoff}, width, rule);
      estimates.push_back(factor * tensor_sum(axis, d, integrand));
    }
  }
  return richardson_in_inverse_cutoff(estimates);
}

AuditReport inversion_audit(const MatrixCovarianceModel &model,
                            std::span<const std::vector<double>> lags, double tol,
                            const InversionQuadrature &quad) {
  AuditReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto &lag : lags) {
    for (std::size_t k = 0; k < model.p(); ++k) {
      for (std::size_t l = k; l < model.p(); ++l) {
        const double direct = model.eval(k, l, lag);
        const double inverted = inverse_transform(model, k, l, lag, quad);
        const double margin = tol - std::abs(direct - inverted);
        ++report.samples;
        if (!(margin >= 0.0)) {
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
  report.pass = report.failures == 0 && !lags.empty();
  return report;
}

} // namespace specfloor
