#include "specfloor/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specfloor/errors.hpp"

namespace specfloor {

GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0) {
    throw ParameterError("gauss_legendre: node count must be positive");
  }
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk =
            ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p0 = 1.0;
      }
      derivative = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) {
        break;
      }
    }
    if (n == 1) {
      x = 0.0;
      derivative = 1.0;
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

double composite_gauss_legendre(const std::function<double(double)> &f,
                                double a, double b, std::size_t panels,
                                const GaussLegendreRule &rule) {
  if (panels == 0) {
    throw ParameterError("composite_gauss_legendre: need at least one panel");
  }
  const double width = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double mid = lo + 0.5 * width;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      panel += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
    }
    total += 0.5 * width * panel;
  }
  return total;
}

double piecewise_gauss_legendre(const std::function<double(double)> &f,
                                std::span<const double> breakpoints,
                                double max_width, const GaussLegendreRule &rule) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (b <= a) {
      continue;
    }
    const auto panels = static_cast<std::size_t>(
        std::max(1.0, std::ceil((b - a) / max_width)));
    total += composite_gauss_legendre(f, a, b, panels, rule);
  }
  return total;
}

double richardson_in_inverse_cutoff(std::span<const double> estimates) {
  if (estimates.empty()) {
    throw ParameterError("richardson_in_inverse_cutoff: no estimates");
  }
  std::vector<double> column(estimates.begin(), estimates.end());
  // Doubling F halves 1/F, so order-k elimination uses the factor 2^k.
  for (std::size_t order = 1; order < estimates.size(); ++order) {
    const double factor = std::ldexp(1.0, static_cast<int>(order));
    for (std::size_t j = estimates.size() - 1; j >= order; --j) {
      column[j] = (factor * column[j] - column[j - 1]) / (factor - 1.0);
    }
  }
  return column.back();
}

} // namespace specfloor
