#include <cmath>
#include <random>
#include <vector>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "specfloor/covmodels.hpp"
#include "specfloor/errors.hpp"

using namespace specfloor;

namespace {

MatrixCovarianceModel scalar_model(CovKind kind, double var, double range, double nu = 0.5,
                                   int d = 1) {
  return make_lmc({{Eigen::MatrixXd::Ones(1, 1), make_isotropic(kind, var, range, nu)}}, d);
}

MatrixCovarianceModel random_lmc(std::mt19937_64 &rng, int p, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), r(0.3, 2.0);
  std::vector<LmcComponent> comps;
  for (int c = 0; c < 2; ++c) {
    Eigen::MatrixXd a(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        a(i, j) = u(rng);
    a.diagonal().array() += 2.0;
    comps.push_back({a, make_isotropic(c ? CovKind::matern : CovKind::exponential, 1.0,
                                       r(rng), 1.5)});
  }
  return make_lmc(comps, d);
}

} // namespace

TEST(Isotropic, ExponentialMatchesClosedFormAt20Lags) {
  const auto rho = make_isotropic(CovKind::exponential, 1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double t = 0.37 * i;
    EXPECT_NEAR(rho(t), std::exp(-t), 1e-15) << t;
  }
}

TEST(Isotropic, MaternHalfIntegerForms) {
  const auto m15 = make_isotropic(CovKind::matern, 2.0, 0.7, 1.5);
  const auto m25 = make_isotropic(CovKind::matern, 2.0, 0.7, 2.5);
  for (double t : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0}) {
    const double s = t / 0.7;
    EXPECT_NEAR(m15(t), 2.0 * (1 + s) * std::exp(-s), 1e-14);
    EXPECT_NEAR(m25(t), 2.0 * (1 + s + s * s / 3) * std::exp(-s), 1e-14);
  }
}

TEST(Isotropic, MaternGeneralNuAgainstBoostBessel) {
  const double nu = 0.8, range = 1.3, var = 1.7;
  const auto m = make_isotropic(CovKind::matern, var, range, nu);
  EXPECT_NEAR(m(0.0), var, 1e-14);
  for (double t : {0.05, 0.4, 1.0, 2.5, 7.0}) {
    const double s = t / range;
    const double ref = var * std::pow(2.0, 1 - nu) / boost::math::tgamma(nu) *
                       std::pow(s, nu) * boost::math::cyl_bessel_k(nu, s);
    EXPECT_NEAR(m(t), ref, 1e-13 * var) << t;
  }
}

TEST(Isotropic, GaussianAndTriangular) {
  const auto g = make_isotropic(CovKind::gaussian, 1.5, 2.0);
  const auto tri = make_isotropic(CovKind::triangular, 1.0, 1.0);
  for (double t : {0.0, 0.25, 0.5, 1.0, 1.5}) {
    EXPECT_NEAR(g(t), 1.5 * std::exp(-t * t / 4.0), 1e-15);
    EXPECT_NEAR(tri(t), std::max(0.0, 1.0 - t), 1e-15);
  }
}

TEST(SpectralDensity, OneDimensionalCosineTransformOracle) {
  // rho_hat(f) = (1 / pi) \int_0^inf rho(t) cos(f t) dt in d = 1.
  boost::math::quadrature::ooura_fourier_cos<double> cosine;
  const std::vector<IsotropicCovariance> kernels{
      make_isotropic(CovKind::exponential, 1.0, 1.0),
      make_isotropic(CovKind::matern, 2.0, 0.5, 1.5),
      make_isotropic(CovKind::gaussian, 1.0, 0.8)};
  for (const auto &rho : kernels) {
    for (double f : {0.3, 1.0, 2.7}) {
      const auto [value, err] = cosine.integrate([&](double t) { return rho(t); }, f);
      EXPECT_NEAR(rho.spectral_density(f, 1), value / M_PI, 1e-9) << to_string(rho.kind());
    }
  }
  // Triangular has an explicit transform: (1 - cos f) / (pi f^2).
  const auto tri = make_isotropic(CovKind::triangular, 1.0, 1.0);
  for (double f : {0.3, 1.0, 2.7, 2 * M_PI})
    EXPECT_NEAR(tri.spectral_density(f, 1), (1 - std::cos(f)) / (M_PI * f * f), 1e-15);
}

TEST(SpectralDensity, IntegratesToVariance) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const std::vector<IsotropicCovariance> kernels{
      make_isotropic(CovKind::exponential, 1.3, 0.6),
      make_isotropic(CovKind::matern, 1.0, 1.5, 1.5),
      make_isotropic(CovKind::matern, 1.0, 1.0, 2.2),
      make_isotropic(CovKind::gaussian, 0.9, 1.1)};
  for (const auto &rho : kernels) {
    const double one = 2.0 * integrator.integrate(
                                 [&](double f) { return rho.spectral_density(f, 1); }, 0.0,
                                 std::numeric_limits<double>::infinity());
    EXPECT_NEAR(one, rho.variance(), 1e-8) << to_string(rho.kind());
    const double two = 2.0 * M_PI * integrator.integrate(
                                         [&](double f) { return f * rho.spectral_density(f, 2); },
                                         0.0, std::numeric_limits<double>::infinity());
    EXPECT_NEAR(two, rho.variance(), 1e-8) << to_string(rho.kind());
  }
}

TEST(Lmc, ValueAtZeroIsWeightedSum) {
  Eigen::MatrixXd a(2, 1), b(2, 2);
  a << 1.0, 0.5;
  b << 0.3, 0.0, 0.2, 0.9;
  const auto model = make_lmc({{a, make_isotropic(CovKind::exponential, 2.0, 1.0)},
                               {b, make_isotropic(CovKind::gaussian, 1.0, 1.0)}},
                              2);
  const std::vector<double> zero{0.0, 0.0};
  const Eigen::MatrixXd expected = 2.0 * a * a.transpose() + b * b.transpose();
  EXPECT_LT((model.at(zero) - expected).cwiseAbs().maxCoeff(), 1e-15);
  const std::vector<double> lag{0.6, 0.8};
  const Eigen::MatrixXd at_one = 2.0 * std::exp(-1.0) * a * a.transpose() +
                                 std::exp(-1.0) * b * b.transpose();
  EXPECT_LT((model.at(lag) - at_one).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Lmc, SymmetryAndEvennessOnRandomLags) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 3.0);
  for (int d : {1, 2, 3}) {
    const auto model = random_lmc(rng, 3, d);
    for (int s = 0; s < 1000; ++s) {
      std::vector<double> x(d), minus(d);
      for (int j = 0; j < d; ++j) {
        x[j] = gauss(rng);
        minus[j] = -x[j];
      }
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
          EXPECT_EQ(model.eval(k, l, x), model.eval(l, k, x));
          EXPECT_EQ(model.eval(k, l, x), model.eval(k, l, minus));
        }
    }
  }
}

TEST(Lmc, SpectralMatrixIsSymmetricPsd) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const auto model = random_lmc(rng, 3, 2);
  for (int s = 0; s < 100; ++s) {
    const std::vector<double> f{u(rng), u(rng)};
    const Eigen::MatrixXd m = model.spectral(f);
    EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    EXPECT_GT(solver.eigenvalues()(0), -1e-14);
  }
}

TEST(Lmc, EnvelopeConstantDominatesKernel) {
  for (const auto &rho : {make_isotropic(CovKind::exponential, 1.0, 2.0),
                          make_isotropic(CovKind::matern, 1.0, 1.0, 1.5),
                          make_isotropic(CovKind::gaussian, 1.0, 3.0)}) {
    for (int d : {1, 2}) {
      const double A = rho.envelope_constant(d, 1.0);
      for (int i = 0; i <= 4000; ++i) {
        const double t = 0.025 * i;
        EXPECT_LE(std::abs(rho(t)), A / (1 + std::pow(t, d + 1.0)) * (1 + 1e-12));
      }
    }
  }
}

TEST(DecayAudit, PassesForDerivedConstantsAndFailsWhenTooSmall) {
  const auto model = scalar_model(CovKind::exponential, 1.0, 1.0);
  const auto samples = radial_lag_samples(1, 50.0, 400);
  EXPECT_TRUE(decay_audit(model, samples).pass);
  const auto tight = model.with_decay(0.5, 1.0);
  const AuditReport report = decay_audit(tight, samples);
  EXPECT_FALSE(report.pass);
  EXPECT_LT(report.worst_margin, 0.0);
  EXPECT_GT(report.failures, 0u);
}

TEST(Norms, MaxAndEuclidean) {
  const std::vector<double> x{3.0, -4.0};
  EXPECT_EQ(max_norm(x), 4.0);
  EXPECT_EQ(euclidean_norm(x), 5.0);
}

TEST(Errors, InvalidParametersAndShapes) {
  EXPECT_THROW(make_isotropic(CovKind::exponential, 1.0, 0.0), ParameterError);
  EXPECT_THROW(make_isotropic(CovKind::exponential, -1.0, 1.0), ParameterError);
  EXPECT_THROW(make_isotropic(CovKind::matern, 1.0, 1.0, 0.0), ParameterError);
  EXPECT_THROW(cov_kind_from_string("cauchy"), ParameterError);
  EXPECT_THROW(scalar_model(CovKind::triangular, 1.0, 1.0, 0.5, 2), ParameterError);
  EXPECT_THROW(make_lmc({}, 1), ShapeError);
  EXPECT_THROW(make_lmc({{Eigen::MatrixXd::Ones(2, 1), make_isotropic(CovKind::exponential, 1, 1)},
                         {Eigen::MatrixXd::Ones(3, 1), make_isotropic(CovKind::exponential, 1, 1)}},
                        1),
               ShapeError);
  const auto model = scalar_model(CovKind::exponential, 1.0, 1.0);
  const std::vector<double> lag1{0.5}, lag2{0.5, 0.5};
  EXPECT_THROW(model.eval(1, 0, lag1), IndexError);
  EXPECT_THROW(model.eval(0, 0, lag2), ShapeError);
  EXPECT_THROW(model.with_decay(-1.0, 1.0), ParameterError);
}
