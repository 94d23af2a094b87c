#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "specfloor/designs.hpp"
#include "specfloor/errors.hpp"

using namespace specfloor;

namespace {

double brute_min_distance(const std::vector<Point> &points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double m = 0;
      for (std::size_t c = 0; c < points[i].size(); ++c)
        m = std::max(m, std::abs(points[i][c] - points[j][c]));
      best = std::min(best, m);
    }
  return best;
}

} // namespace

TEST(GridDesign, LexicographicCube) {
  const std::vector<std::size_t> counts{5, 4};
  const std::vector<Point> offsets{{0.0, 0.0}, {0.25, 0.5}};
  const Design design = make_grid_design(2, counts, 2.0, offsets);
  EXPECT_EQ(design.total(), 9u);
  EXPECT_EQ(design.offsets(), (std::vector<std::size_t>{0, 5, 9}));
  // side 3 for 5 points: (0,0) (0,1) (0,2) (1,0) (1,1).
  const std::vector<Point> first{{0, 0}, {0, 2}, {0, 4}, {2, 0}, {2, 2}};
  EXPECT_EQ(design.process(0), first);
  const std::vector<Point> second{{0.25, 0.5}, {0.25, 2.5}, {2.25, 0.5}, {2.25, 2.5}};
  EXPECT_EQ(design.process(1), second);
}

TEST(GridDesign, MinDistanceIsSpacing) {
  for (int d : {1, 2, 3}) {
    const std::vector<std::size_t> counts{30, 1};
    const Design design = make_grid_design(d, counts, 0.75);
    const MinDistanceReport report = min_distance(design);
    EXPECT_DOUBLE_EQ(report.per_process[0], 0.75);
    EXPECT_TRUE(MinDistanceReport::unconstrained(report.per_process[1]));
    EXPECT_DOUBLE_EQ(report.overall, 0.75);
  }
}

TEST(RandomDesign, RespectsMinimumDistanceAndRegion) {
  const std::vector<std::size_t> counts{60, 40};
  const Region region{{0.0, -1.0}, {20.0, 19.0}};
  const Design design = make_random_min_dist(2, counts, 1.5, region, 42);
  const MinDistanceReport report = min_distance(design);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(design.count(k), counts[k]);
    EXPECT_GE(report.per_process[k], 1.5);
    EXPECT_DOUBLE_EQ(report.per_process[k], brute_min_distance(design.process(k)));
    for (const Point &x : design.process(k))
      for (int j = 0; j < 2; ++j) {
        EXPECT_GE(x[j], region.lower[j]);
        EXPECT_LE(x[j], region.upper[j]);
      }
  }
}

TEST(RandomDesign, DeterministicForSeed) {
  const std::vector<std::size_t> counts{25};
  const Region region{{0.0}, {100.0}};
  EXPECT_EQ(make_random_min_dist(1, counts, 1.0, region, 5),
            make_random_min_dist(1, counts, 1.0, region, 5));
  EXPECT_FALSE(make_random_min_dist(1, counts, 1.0, region, 5) ==
               make_random_min_dist(1, counts, 1.0, region, 6));
}

TEST(RandomDesign, SaturationIsReported) {
  const std::vector<std::size_t> counts{3, 50};
  const Region region{{0.0}, {5.0}};
  try {
    make_random_min_dist(1, counts, 1.0, region, 1, 500);
    FAIL() << "expected saturation";
  } catch (const SaturationError &error) {
    EXPECT_EQ(error.process(), 1u);
  }
}

TEST(MinDistance, PermutationInvariantAndMatchesBruteForce) {
  std::mt19937_64 rng(9);
  const std::vector<std::size_t> counts{40};
  const Design design = make_random_min_dist(2, counts, 0.5, Region{{0, 0}, {10, 10}}, 3);
  auto points = design.process(0);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(points.begin(), points.end(), rng);
    const Design shuffled(2, {points});
    EXPECT_EQ(min_distance(shuffled).overall, min_distance(design).overall);
  }
  EXPECT_DOUBLE_EQ(min_distance(design).overall, brute_min_distance(points));
}

TEST(MinDistance, DuplicatePointThrows) {
  const Design design(1, {{{0.0}, {1.0}}, {{2.0}, {3.0}, {2.0}}});
  try {
    min_distance(design);
    FAIL() << "expected duplicate detection";
  } catch (const ZeroDistanceError &error) {
    EXPECT_EQ(error.process(), 1u);
  }
}

TEST(Design, ScaledMultipliesCoordinates) {
  const std::vector<std::size_t> counts{4};
  const Design design = make_grid_design(1, counts, 1.0).scaled(2.0);
  EXPECT_DOUBLE_EQ(min_distance(design).overall, 2.0);
}

TEST(DesignTable, RoundTripsExactly) {
  const std::vector<std::size_t> counts{7, 3};
  const Design design =
      make_random_min_dist(2, counts, 0.3, Region{{0.0, 0.0}, {3.0, 3.0}}, 77);
  std::stringstream buffer;
  write_design_table(buffer, design);
  EXPECT_EQ(read_design_table(buffer), design);
}

TEST(Errors, DesignConstruction) {
  const std::vector<std::size_t> counts{3};
  EXPECT_THROW(make_grid_design(1, counts, 0.0), ParameterError);
  EXPECT_THROW(make_grid_design(0, counts, 1.0), ParameterError);
  EXPECT_THROW(make_grid_design(1, counts, 1.0, {{0.0}, {1.0}}), ShapeError);
  EXPECT_THROW(make_random_min_dist(1, counts, -1.0, Region{{0.0}, {1.0}}, 0), ParameterError);
  EXPECT_THROW(make_random_min_dist(2, counts, 1.0, Region{{0.0}, {1.0}}, 0), ShapeError);
  EXPECT_THROW(Design(2, {{{0.0, 1.0}, {1.0}}}), ShapeError);
  std::stringstream bad("1 1 0.0\n3 1 2.0\n");
  EXPECT_THROW(read_design_table(bad), ShapeError);
}
