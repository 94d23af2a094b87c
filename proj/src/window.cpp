#include "specfloor/window.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "specfloor/errors.hpp"
#include "specfloor/parallel.hpp"
#include "specfloor/quadrature.hpp"

namespace specfloor {

namespace {

constexpr double kTableLimit = 512.0;
constexpr double kPanelWidth = 0.5;
constexpr std::size_t kDegree = 16;

double unit_bump(double u) {
  const double a = std::abs(u);
  if (a >= 1.0) {
    return 0.0;
  }
  return std::exp(-1.0 / (1.0 - a * a));
}

const GaussLegendreRule &profile_rule() {
  static const GaussLegendreRule rule = gauss_legendre(20);
  return rule;
}

double profile_with_panels(double t, std::size_t panels) {
  // g is even in t and bump is even in u: 2 \int_0^1 bump(u) cos(u t) du.
  return 2.0 * composite_gauss_legendre(
                   [t](double u) { return unit_bump(u) * std::cos(u * t); }, 0.0, 1.0,
                   panels, profile_rule());
}

} // namespace

double unit_profile_direct(double t) {
  const double a = std::abs(t);
  // Keep (panel width) * |t| near 10 so each 20-node panel resolves its
  // oscillations to rounding level.
  const auto panels = static_cast<std::size_t>(std::max(16.0, std::ceil(a / 10.0)));
  return profile_with_panels(a, panels);
}

double unit_profile_at_zero() {
  std::size_t panels = 2;
  double previous = profile_with_panels(0.0, panels);
  for (int iter = 0; iter < 20; ++iter) {
    panels *= 2;
    const double current = profile_with_panels(0.0, panels);
    if (std::abs(current - previous) < 1e-15) {
      return current;
    }
    previous = current;
  }
  return previous;
}

// Chebyshev coefficients of the unit-radius g on [i W, (i + 1) W].
class ProfileTable {
public:
  ProfileTable() {
    const auto panels = static_cast<std::size_t>(kTableLimit / kPanelWidth);
    coefficients_.resize(panels);
    std::array<double, kDegree + 1> nodes{};
    for (std::size_t j = 0; j <= kDegree; ++j) {
      nodes[j] = std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) /
                          static_cast<double>(kDegree + 1));
    }
    parallel_for(panels, [&](std::size_t p) {
      const double lo = kPanelWidth * static_cast<double>(p);
      std::array<double, kDegree + 1> values{};
      for (std::size_t j = 0; j <= kDegree; ++j) {
        values[j] = unit_profile_direct(lo + 0.5 * kPanelWidth * (nodes[j] + 1.0));
      }
      auto &c = coefficients_[p];
      for (std::size_t k = 0; k <= kDegree; ++k) {
        double sum = 0.0;
        for (std::size_t j = 0; j <= kDegree; ++j) {
          sum += values[j] * std::cos(std::numbers::pi * static_cast<double>(k) *
                                      (static_cast<double>(j) + 0.5) /
                                      static_cast<double>(kDegree + 1));
        }
        c[k] = (k == 0 ? 1.0 : 2.0) * sum / static_cast<double>(kDegree + 1);
      }
    });
    zero_ = unit_profile_at_zero();

    // Sampled magnitude over the last quarter of the table, floored at the
    // absolute rounding level of the quadrature.
    double tail = 0.0;
    for (double t = 0.75 * kTableLimit; t <= kTableLimit; t += 0.05) {
      tail = std::max(tail, std::abs(evaluate(t)));
    }
    tail_bound_ = std::max(tail, 1e-16 * zero_);
  }

  double evaluate(double t) const {
    const double a = std::abs(t);
    if (a == 0.0) {
      return zero_;
    }
    if (a >= kTableLimit) {
      return 0.0;
    }
    const auto p = std::min(coefficients_.size() - 1,
                            static_cast<std::size_t>(a / kPanelWidth));
    const double lo = kPanelWidth * static_cast<double>(p);
    const double x = 2.0 * (a - lo) / kPanelWidth - 1.0;
    const auto &c = coefficients_[p];
    // Clenshaw recurrence.
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = kDegree; k >= 1; --k) {
      const double b0 = 2.0 * x * b1 - b2 + c[k];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + c[0];
  }

  double zero() const { return zero_; }
  double tail_bound() const { return tail_bound_; }

private:
  std::vector<std::array<double, kDegree + 1>> coefficients_;
  double zero_ = 0.0;
  double tail_bound_ = 0.0;
};

namespace {

std::shared_ptr<const ProfileTable> shared_table() {
  static const std::shared_ptr<const ProfileTable> table =
      std::make_shared<const ProfileTable>();
  return table;
}

} // namespace

Window::Window(int d, double radius, std::shared_ptr<const ProfileTable> table)
    : d_(d), radius_(radius), table_(std::move(table)) {
  const double g0 = radius_ * table_->zero();
  h0_ = std::pow(g0, d_);
  hhat_max_ = std::pow(unit_bump(0.0), d_);
}

double Window::bump(double u) const { return unit_bump(u / radius_); }

double Window::hhat(std::span<const double> f) const {
  double value = 1.0;
  for (double fj : f) {
    value *= bump(fj);
  }
  return value;
}

double Window::profile(double t) const {
  // g_r(t) = r g_1(r t).
  return radius_ * table_->evaluate(radius_ * t);
}

double Window::operator()(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(d_)) {
    throw ShapeError("window argument has the wrong dimension");
  }
  double value = 1.0;
  for (double xj : x) {
    value *= profile(xj);
  }
  return value;
}

double Window::profile_tail_bound() const { return radius_ * table_->tail_bound(); }

double Window::table_limit() const { return kTableLimit / radius_; }

std::string Window::profile_name() const {
  return "bump(u) = exp(-1/(1-(u/r)^2)), tensor product, r = " +
         std::to_string(radius_);
}

Window build_window(int d, double support_radius) {
  if (d <= 0) {
    throw ParameterError("window dimension must be positive");
  }
  if (!(support_radius > 0.0) || !std::isfinite(support_radius)) {
    throw ParameterError("window support radius must be positive");
  }
  return Window(d, support_radius, shared_table());
}

} // namespace specfloor
