#pragma once

#include <memory>
#include <span>
#include <string>

namespace specfloor {

class ProfileTable;

/*
 * Spectral window pair (h, h_hat) on R^d:
 *
 *   h_hat(f) = prod_j bump(f_j),   bump(u) = exp(-1 / (1 - (u/r)^2)) on |u| < r
 *   h(x)     = \int h_hat(f) exp(i f.x) df = prod_j g(x_j)
 *   g(t)     = \int_{-r}^{r} bump(u) cos(u t) du
 *
 * h_hat is even, nonnegative, C-infinity and supported on [-r, r]^d, so h is
 * real and even with h(0) = g(0)^d > 0.
 *
 * g is served from a piecewise Chebyshev table built once per process from
 * composite Gauss-Legendre quadrature. Beyond the table |g| is below the
 * double-precision noise floor of the quadrature and is represented by
 * profile_tail_bound().
 */
class Window {
public:
  int d() const { return d_; }
  double support_radius() const { return radius_; }
  double h0() const { return h0_; }
  // sup h_hat = bump(0)^d.
  double hhat_max() const { return hhat_max_; }

  double bump(double u) const;
  double hhat(std::span<const double> f) const;
  // One-dimensional factor g.
  double profile(double t) const;
  double operator()(std::span<const double> x) const;

  // Magnitude charged for |g(t)| once |t| >= table_limit().
  double profile_tail_bound() const;
  double table_limit() const;

  std::string profile_name() const;

private:
  friend Window build_window(int d, double support_radius);
  Window(int d, double radius, std::shared_ptr<const ProfileTable> table);

  int d_;
  double radius_;
  std::shared_ptr<const ProfileTable> table_;
  double h0_;
  double hhat_max_;
};

// Throws ParameterError for d <= 0 or support_radius <= 0.
Window build_window(int d, double support_radius = 1.0);

// Unit-radius g(t) by direct composite Gauss-Legendre quadrature with panel
// count growing with |t|; slow, used to fill the table.
double unit_profile_direct(double t);

// Unit-radius g(0) by panel doubling until successive estimates agree to 1e-15.
double unit_profile_at_zero();

} // namespace specfloor
