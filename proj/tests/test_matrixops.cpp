#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "specfloor/errors.hpp"
#include "specfloor/matrixops.hpp"

using namespace specfloor;

namespace {

Eigen::MatrixXd random_symmetric(std::mt19937_64 &rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      m(i, j) = m(j, i) = g(rng);
  return m;
}

Eigen::MatrixXd random_psd(std::mt19937_64 &rng, int n, bool unit_diagonal) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd b(n, n + 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n + 2; ++j)
      b(i, j) = g(rng);
  Eigen::MatrixXd m = b * b.transpose();
  if (unit_diagonal) {
    const Eigen::VectorXd s = m.diagonal().cwiseSqrt().cwiseInverse();
    m = s.asDiagonal() * m * s.asDiagonal();
    m.diagonal().setOnes();
  }
  return m;
}

// Number of eigenvalues below x from the inertia of a pivoted LDL^T.
int count_below(const Eigen::MatrixXd &m, double x) {
  Eigen::MatrixXd shifted = m - x * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
  return static_cast<int>((ldlt.vectorD().array() < 0).count());
}

double bisection_lambda1(const Eigen::MatrixXd &m) {
  double lo = -m.cwiseAbs().rowwise().sum().maxCoeff() - 1;
  double hi = -lo;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (count_below(m, mid) >= 1 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

MatrixCovarianceModel lmc2(int d) {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.7, 0.5;
  return make_lmc({{a, make_isotropic(CovKind::exponential, 1.0, 0.8)}}, d);
}

} // namespace

TEST(AssembleSigma, EntriesFollowBlockLayout) {
  const std::vector<std::size_t> counts{4, 3};
  const Design design = make_grid_design(2, counts, 1.0, {{0, 0}, {0.5, 0.25}});
  const auto model = lmc2(2);
  const CovMatrix sigma = assemble_sigma(model, design);
  ASSERT_EQ(sigma.size(), 7u);
  EXPECT_EQ(sigma.offsets, design.offsets());
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t l = 0; l < 2; ++l)
      for (std::size_t i = 0; i < design.count(k); ++i)
        for (std::size_t j = 0; j < design.count(l); ++j) {
          std::vector<double> lag(2);
          for (int c = 0; c < 2; ++c)
            lag[c] = design.process(k)[i][c] - design.process(l)[j][c];
          EXPECT_EQ(sigma.entries(design.offsets()[k] + i, design.offsets()[l] + j),
                    model.eval(k, l, lag));
        }
  EXPECT_EQ(sigma.entries, sigma.entries.transpose());
}

TEST(AssembleSigma, ShapeMismatchThrows) {
  const std::vector<std::size_t> counts{4};
  EXPECT_THROW(assemble_sigma(lmc2(1), make_grid_design(1, counts, 1.0)), ShapeError);
  const std::vector<std::size_t> two{4, 4};
  EXPECT_THROW(assemble_sigma(lmc2(1), make_grid_design(2, two, 1.0)), ShapeError);
}

TEST(SmallestEigenvalue, AgreesWithInertiaBisectionOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd m = random_symmetric(rng, 6);
    EXPECT_NEAR(smallest_eigenvalue(m), bisection_lambda1(m), 1e-10);
  }
}

TEST(Gershgorin, NeverExceedsLambda1) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd m = random_symmetric(rng, 2 + trial % 9);
    EXPECT_LE(gershgorin_floor(m), smallest_eigenvalue(m) + 1e-12);
  }
}

TEST(TridiagToeplitz, ClosedFormMatchesSolver) {
  for (std::size_t n = 1; n <= 64; ++n) {
    const auto closed = tridiag_toeplitz_eigs(n, 1.0, 0.5);
    Eigen::VectorXd numeric = symmetric_eigenvalues(tridiag_toeplitz(n, 1.0, 0.5));
    ASSERT_EQ(closed.size(), n);
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_NEAR(closed[i], numeric(n - 1 - i), 1e-12) << n;
    EXPECT_TRUE(std::is_sorted(closed.rbegin(), closed.rend()));
  }
}

TEST(Taper, SchurBoundOnRandomPairs) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 12;
    const Eigen::MatrixXd sigma = random_psd(rng, n, false);
    const TaperMatrix taper(random_psd(rng, n, trial % 2 == 0));
    const double lambda1 = smallest_eigenvalue(sigma);
    const double bound = taper_floor(lambda1, taper);
    EXPECT_GE(smallest_eigenvalue(schur_product(sigma, taper.entries())) - bound, -1e-10);
  }
}

TEST(Taper, AllOnesIsEquality) {
  std::mt19937_64 rng(17);
  const Eigen::MatrixXd sigma = random_psd(rng, 8, false);
  const TaperMatrix ones(Eigen::MatrixXd::Ones(8, 8));
  EXPECT_EQ(schur_product(sigma, ones.entries()), sigma);
  EXPECT_EQ(taper_floor(smallest_eigenvalue(sigma), ones), smallest_eigenvalue(sigma));
}

TEST(Taper, WendlandIsPsdWithUnitDiagonal) {
  const std::vector<std::size_t> counts{25, 25};
  const Design design = make_grid_design(2, counts, 0.5, {{0, 0}, {0.2, 0.1}});
  const TaperMatrix taper = wendland_taper(design, 1.7);
  EXPECT_EQ(taper.diag_min(), 1.0);
  EXPECT_GT(smallest_eigenvalue(taper.entries()), -1e-12);
  EXPECT_EQ(taper.entries()(0, 1), std::pow(1 - 0.5 / 1.7, 4) * (4 * 0.5 / 1.7 + 1));
}

TEST(Taper, ContractViolations) {
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(TaperMatrix{indefinite}, ContractError);
  Eigen::MatrixXd zero_diag = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_THROW(TaperMatrix{zero_diag}, ContractError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.1, 0.2, 1.0;
  EXPECT_THROW(TaperMatrix{asym}, ContractError);
  EXPECT_THROW(taper_floor(-0.1, TaperMatrix(Eigen::MatrixXd::Identity(2, 2))), ContractError);
  EXPECT_THROW(require_symmetric(asym, "test"), ContractError);
  EXPECT_THROW(schur_product(Eigen::MatrixXd::Ones(2, 2), Eigen::MatrixXd::Ones(3, 3)),
               ShapeError);
}

TEST(Lambda1, InvariantUnderPointPermutation) {
  std::mt19937_64 rng(29);
  const std::vector<std::size_t> counts{12, 9};
  const Design design = make_random_min_dist(2, counts, 0.6, Region{{0, 0}, {5, 5}}, 8);
  const auto model = lmc2(2);
  const double base = smallest_eigenvalue(assemble_sigma(model, design).entries);
  for (int trial = 0; trial < 5; ++trial) {
    auto processes = design.processes();
    for (auto &points : processes)
      std::shuffle(points.begin(), points.end(), rng);
    const Design shuffled(2, processes);
    EXPECT_NEAR(smallest_eigenvalue(assemble_sigma(model, shuffled).entries), base, 1e-12);
  }
}

TEST(MatrixCsv, SeventeenDigitsRoundTrip) {
  std::mt19937_64 rng(31);
  const Eigen::MatrixXd m = random_symmetric(rng, 4);
  std::ostringstream out;
  write_matrix_csv(out, m);
  std::istringstream in(out.str());
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    std::stringstream cells(line);
    std::string cell;
    int col = 0;
    while (std::getline(cells, cell, ','))
      EXPECT_EQ(std::stod(cell), m(row, col++));
    EXPECT_EQ(col, 4);
    ++row;
  }
  EXPECT_EQ(row, 4);
}
