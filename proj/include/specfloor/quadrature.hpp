#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace specfloor {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes by Newton iteration on P_n; weights 2 / ((1 - x^2) P_n'(x)^2).
GaussLegendreRule gauss_legendre(std::size_t n);

// Integral of f over [a, b] split into `panels` equal panels, each with the
// given rule.
double composite_gauss_legendre(const std::function<double(double)> &f,
                                double a, double b, std::size_t panels,
                                const GaussLegendreRule &rule);

// Composite rule over an explicit ordered list of breakpoints. Each interval
// [b_i, b_{i+1}] is further split into pieces no wider than max_width.
double piecewise_gauss_legendre(const std::function<double(double)> &f,
                                std::span<const double> breakpoints,
                                double max_width, const GaussLegendreRule &rule);

// Richardson extrapolation of estimates I(F_j) with F_j = F_0 2^j, assuming
// I(F) = I + a_1 / F + a_2 / F^2 + ... Returns the highest-order estimate.
double richardson_in_inverse_cutoff(std::span<const double> estimates);

} // namespace specfloor
