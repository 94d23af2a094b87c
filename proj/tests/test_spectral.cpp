#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "specfloor/errors.hpp"
#include "specfloor/spectral.hpp"

using namespace specfloor;

namespace {

MatrixCovarianceModel scalar_model(CovKind kind, double var, double range, double nu = 0.5,
                                   int d = 1) {
  return make_lmc({{Eigen::MatrixXd::Ones(1, 1), make_isotropic(kind, var, range, nu)}}, d);
}

MatrixCovarianceModel two_process(int d) {
  Eigen::MatrixXd a(2, 2), b(2, 1);
  a << 1.0, 0.0, 0.6, 0.8;
  b << 0.5, -0.4;
  return make_lmc({{a, make_isotropic(CovKind::exponential, 1.0, 1.0)},
                   {b, make_isotropic(CovKind::matern, 1.0, 0.5, 1.5)}},
                  d);
}

} // namespace

TEST(SpectralMatrix, ClosedFormAgainstNumericTransform1d) {
  const auto model = two_process(1);
  for (double f : {0.0, 0.4, 1.7, 3.0}) {
    const std::vector<double> freq{f};
    const SpectralMatrix closed = spectral_matrix(model, freq);
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t l = 0; l < 2; ++l) {
        const auto numeric = numeric_fourier_oracle(model, k, l, freq, FourierQuadrature{});
        EXPECT_NEAR(closed.entries(k, l).real(), numeric.real(), 1e-9) << f;
        EXPECT_NEAR(numeric.imag(), 0.0, 1e-12);
      }
    EXPECT_LT(closed.hermitian_defect(), 1e-15);
  }
}

TEST(SpectralMatrix, ClosedFormAgainstNumericTransform2d) {
  const auto model = scalar_model(CovKind::gaussian, 1.0, 1.0, 0.5, 2);
  FourierQuadrature quad;
  quad.radius = 12.0;
  for (const auto &freq : {std::vector<double>{0.0, 0.0}, std::vector<double>{0.7, -1.1}}) {
    const auto numeric = numeric_fourier_oracle(model, 0, 0, freq, quad);
    EXPECT_NEAR(spectral_matrix(model, freq).entries(0, 0).real(), numeric.real(), 1e-10);
  }
  const auto exp2 = scalar_model(CovKind::exponential, 1.0, 1.0, 0.5, 2);
  const std::vector<double> freq{0.5, 0.25};
  const auto numeric = numeric_fourier_oracle(exp2, 0, 0, freq, FourierQuadrature{});
  EXPECT_NEAR(spectral_matrix(exp2, freq).entries(0, 0).real(), numeric.real(), 1e-7);
}

TEST(SpectralLambda1, MatchesEigenOnRandomModels) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int p = 1; p <= 3; ++p) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(p, p), b = Eigen::MatrixXd::Random(p, p);
    const auto model = make_lmc({{a, make_isotropic(CovKind::exponential, 1.0, 0.7)},
                                 {b, make_isotropic(CovKind::gaussian, 1.0, 1.3)}},
                                2);
    for (int s = 0; s < 50; ++s) {
      const std::vector<double> f{3 * u(rng), 3 * u(rng)};
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(model.spectral(f));
      const double ref = solver.eigenvalues()(0);
      EXPECT_NEAR(spectral_lambda1(model, f), ref, 1e-13 * (1 + std::abs(ref)));
    }
  }
}

TEST(SpectralFloor, ExponentialMinimumAtBoxCorner) {
  for (int d : {1, 2}) {
    const auto model = scalar_model(CovKind::exponential, 1.0, 1.0, 0.5, d);
    const SpectralFloor floor = spectral_floor(model, FrequencyBox::symmetric(d, 4.0), 21);
    const double corner = make_isotropic(CovKind::exponential, 1.0, 1.0)
                              .spectral_density(4.0 * std::sqrt(static_cast<double>(d)), d);
    EXPECT_NEAR(floor.value, corner, 1e-15);
  }
}

TEST(SpectralFloor, MonotoneUnderBoxInclusion) {
  const auto model = two_process(1);
  double previous = std::numeric_limits<double>::infinity();
  for (double hw : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double value = spectral_floor(model, FrequencyBox::symmetric(1, hw), 2001).value;
    EXPECT_LE(value, previous * (1 + 1e-9)) << hw;
    previous = value;
  }
}

TEST(SpectralFloor, TriangularZerosAreFound) {
  const auto model = scalar_model(CovKind::triangular, 1.0, 1.0);
  const SpectralFloor floor = spectral_floor(model, FrequencyBox::symmetric(1, 16.0), 2001);
  EXPECT_LT(floor.value, 1e-12);
  const double k = std::round(floor.argmin[0] / (2 * M_PI));
  EXPECT_NE(k, 0.0);
  EXPECT_NEAR(floor.argmin[0], 2 * M_PI * k, 1e-2);
}

TEST(SpectralFloor, DeterministicAcrossThreadCounts) {
  const auto model = two_process(2);
  const auto box = FrequencyBox::symmetric(2, 3.0);
  setenv("SPECFLOOR_THREADS", "1", 1);
  const SpectralFloor one = spectral_floor(model, box, 61);
  setenv("SPECFLOOR_THREADS", "4", 1);
  const SpectralFloor four = spectral_floor(model, box, 61);
  unsetenv("SPECFLOOR_THREADS");
  EXPECT_EQ(one.value, four.value);
  EXPECT_EQ(one.argmin, four.argmin);
}

TEST(Inversion, RecoversCovarianceFromDensity) {
  const std::vector<MatrixCovarianceModel> models{
      scalar_model(CovKind::exponential, 1.0, 1.0),
      scalar_model(CovKind::matern, 1.0, 1.0, 1.5),
      scalar_model(CovKind::triangular, 1.0, 1.0)};
  std::vector<std::vector<double>> lags;
  for (double t : {0.0, 0.5, 1.0, 2.0, 5.0})
    lags.push_back({t});
  for (const auto &model : models) {
    const std::vector<double> zero{0.0};
    EXPECT_NEAR(inverse_transform(model, 0, 0, zero), 1.0, 1e-8) << model.describe();
    const AuditReport report = inversion_audit(model, lags, 1e-6);
    EXPECT_TRUE(report.pass) << model.describe() << " margin " << report.worst_margin;
  }
}

TEST(Errors, OraclePreconditionAndBoxes) {
  const auto bad = scalar_model(CovKind::exponential, 1.0, 1.0).with_decay(0.5, 1.0);
  const std::vector<double> f{0.0};
  EXPECT_THROW(numeric_fourier_oracle(bad, 0, 0, f, FourierQuadrature{}), PreconditionError);
  const auto model = scalar_model(CovKind::exponential, 1.0, 1.0);
  EXPECT_THROW(FrequencyBox::symmetric(1, 0.0), ParameterError);
  EXPECT_THROW(spectral_floor(model, FrequencyBox::symmetric(1, 1.0), 2), ParameterError);
  EXPECT_THROW(spectral_floor(model, FrequencyBox::symmetric(2, 1.0), 11), ShapeError);
  EXPECT_THROW(numeric_fourier_oracle(model, 1, 0, f, FourierQuadrature{}), IndexError);
}
