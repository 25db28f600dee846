#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "sbm/density.hpp"
#include "sbm/error.hpp"

using namespace sbm;

namespace {

constexpr double kPi = std::numbers::pi;

struct Pair {
  double alpha, beta;
};
const Pair kPairs[] = {{1.0, 1.0}, {2.0, 1.0}, {0.5, 1.5}};

std::vector<double> grid(double alpha, double beta, std::size_t n, double margin) {
  std::vector<double> g;
  for (std::size_t i = 0; i < n; ++i) {
    g.push_back(-beta + margin + (alpha + beta - 2.0 * margin) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return g;
}

OccupancyHistogram exactHistogram(const WristbandDensity& d, std::size_t ny, std::size_t ns) {
  OccupancyHistogram h({{"x2", -1.0, 1.0, ny}, {"s1", -d.betaBottom(), d.alphaTop(), ns}});
  const auto m = d.cellMasses(h);
  for (std::size_t flat = 0; flat < m.size(); ++flat) {
    const auto idx = h.multiIndex(flat);
    h.add(vec({0.0, h.axes()[0].mid(idx[0])}), vec({h.axes()[1].mid(idx[1])}), m[flat]);
  }
  return h;
}

}  // namespace

TEST(Density, PointValues) {
  const WristbandDensity d(1.0, 1.0);
  EXPECT_EQ(d.a(0.0), 0.0);
  EXPECT_EQ(d.b(0.0), 1.0);
  for (double y : {-1.0, -0.3, 0.0, 0.8, 1.0}) EXPECT_EQ(d.unnormalized(y, 0.0), 1.0);
  EXPECT_NEAR(d.a(0.5), 0.5 / std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(d.a(0.5), 0.577350, 1e-6);
  EXPECT_NEAR(d.b(0.5), 1.154701, 1e-6);
  EXPECT_NEAR(d.evaluate(0.0, 0.0), 1.0 / (2.0 * kPi), 1e-15);
}

TEST(Density, OutsideSupportAndEndpoints) {
  const WristbandDensity d(2.0, 1.0);
  EXPECT_EQ(d.unnormalized(0.3, 2.5), 0.0);
  EXPECT_EQ(d.unnormalized(0.3, -1.5), 0.0);
  EXPECT_EQ(d.unnormalized(0.3, 2.0), std::numeric_limits<double>::infinity());
  EXPECT_EQ(d.unnormalized(0.3, -1.0), std::numeric_limits<double>::infinity());
  EXPECT_THROW(WristbandDensity(0.0, 1.0), InvalidInput);
  EXPECT_THROW(WristbandDensity(1.0, -1.0), InvalidInput);
}

TEST(Density, NormalizerIsTwoPiForEveryPair) {
  // Oracle: the arcsine integral of 1/sqrt((alpha - s)(beta + s)) over (-beta, alpha) is pi.
  for (const auto& p : kPairs) {
    EXPECT_NEAR(WristbandDensity(p.alpha, p.beta).normalizer(), 2.0 * kPi, 1e-12) << p.alpha << "," << p.beta;
  }
  EXPECT_NEAR(WristbandDensity(1.0, 1.0, 1.01).normalizer(), 2.02 * kPi, 1e-12);
  EXPECT_NEAR(WristbandDensity(7.0, 0.01).normalizer(), 2.0 * kPi, 1e-10);
}

TEST(Density, PositiveOnInteriorGrid) {
  for (const auto& p : kPairs) {
    const WristbandDensity d(p.alpha, p.beta);
    for (int i = 1; i < 200; ++i) {
      const double y = -1.0 + 2.0 * i / 200.0;
      for (int j = 1; j < 200; ++j) {
        const double s = -p.beta + (p.alpha + p.beta) * j / 200.0;
        ASSERT_GT(d.unnormalized(y, s), 0.0) << y << ", " << s;
      }
    }
  }
}

TEST(CellMass, AgreesWithQuadratureOracle) {
  for (const auto& p : kPairs) {
    const WristbandDensity d(p.alpha, p.beta);
    OccupancyHistogram h({{"x2", -1.0, 1.0, 20}, {"s1", -p.beta, p.alpha, 20}});
    const auto m = d.cellMasses(h);
    double total = 0.0;
    for (std::size_t flat = 0; flat < m.size(); ++flat) {
      const auto idx = h.multiIndex(flat);
      const auto& ya = h.axes()[0];
      const auto& sa = h.axes()[1];
      const double want = oracle::wristbandCellMass(p.alpha, p.beta, ya.edge(idx[0]), ya.edge(idx[0] + 1),
                                                    sa.edge(idx[1]), sa.edge(idx[1] + 1));
      EXPECT_NEAR(m[flat], want, 1e-13) << "cell " << flat;
      EXPECT_GT(m[flat], 0.0);
      total += m[flat];
    }
    EXPECT_NEAR(total, 1.0, 1e-13);
  }
}

TEST(CellMass, ClipsToSupport) {
  const WristbandDensity d(1.0, 1.0);
  EXPECT_NEAR(d.cellMass(-5.0, 5.0, -5.0, 5.0), 1.0, 1e-15);
  EXPECT_EQ(d.cellMass(0.0, 1.0, 1.0, 2.0), 0.0);
  // Midpoint-rule cross-check on a cell away from the singular ends.
  const double y0 = 0.1, y1 = 0.3, s0 = -0.2, s1 = 0.1;
  double mid = 0.0;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double y = y0 + (y1 - y0) * (i + 0.5) / n;
      const double s = s0 + (s1 - s0) * (j + 0.5) / n;
      mid += d.evaluate(y, s);
    }
  }
  mid *= (y1 - y0) * (s1 - s0) / (n * n);
  EXPECT_NEAR(d.cellMass(y0, y1, s0, s1), mid, 1e-8);
}

TEST(Compare, ExactMassesGiveZero) {
  for (const auto& p : kPairs) {
    const WristbandDensity d(p.alpha, p.beta);
    const auto cmp = compareToDensity(exactHistogram(d, 20, 20), d);
    EXPECT_LT(cmp.l1, 1e-13);
    EXPECT_LT(cmp.cornerL1, 1e-13);
  }
}

TEST(Compare, CornerCellsAreExcluded) {
  const WristbandDensity d(1.0, 1.0);
  OccupancyHistogram h = exactHistogram(d, 20, 20);
  const auto corners = singularCornerCells(h, d);
  ASSERT_EQ(corners.size(), 2u);
  EXPECT_EQ(corners[0], h.flatIndex({0, 0}));
  EXPECT_EQ(corners[1], h.flatIndex({19, 19}));
  // Piling extra weight into a corner changes cornerL1 far more than l1.
  h.add(vec({0.0, 0.99}), vec({0.99}), 0.5);
  const auto cmp = compareToDensity(h, d);
  EXPECT_GT(cmp.cornerL1, 0.3);
  double sum = 0.0;
  for (std::size_t i = 0; i < cmp.perCell.size(); ++i) {
    if (i != corners[0] && i != corners[1]) sum += cmp.perCell[i];
  }
  EXPECT_NEAR(cmp.l1, sum, 1e-15);
}

TEST(Compare, Errors) {
  const WristbandDensity d(1.0, 1.0);
  EXPECT_THROW(compareToDensity(OccupancyHistogram({{"x2", -1.0, 1.0, 4}, {"s1", -1.0, 1.0, 4}}), d),
               InsufficientData);
  OccupancyHistogram wide({{"x2", -1.0, 1.0, 4}, {"s1", -2.0, 1.0, 4}});
  wide.add(vec({0, 0}), vec({0}), 1.0);
  EXPECT_THROW(compareToDensity(wide, d), InvalidInput);
  OccupancyHistogram one({{"x2", -1.0, 1.0, 4}});
  one.add(vec({0, 0}), vec({0}), 1.0);
  EXPECT_THROW(compareToDensity(one, d), InvalidInput);
}

TEST(Identities, HandExamples) {
  const WristbandDensity d(1.0, 1.0);
  // [g(1) - s] rho~(1, s) at s = 0 is (1 - 0)(a(0) + b(0)) = 1 = (2/2) sqrt(1).
  EXPECT_NEAR((1.0 - 0.0) * d.unnormalized(1.0, 0.0), 1.0, 1e-15);
  const double s = 1.0 - 1e-6;
  EXPECT_LT(std::abs((1.0 - s) * d.unnormalized(1.0, s)), 2e-3);
  // Derivative of the y = -1 flux at s = 0.3 is +a(0.3).
  auto flux = [&](double v) { return (-1.0 - v) * d.unnormalized(-1.0, v); };
  const double h = 1e-6;
  EXPECT_NEAR((flux(0.3 + h) - flux(0.3 - h)) / (2 * h), d.a(0.3), 1e-8);
}

TEST(Identities, AllFamiliesPassOnThousandPointGrid) {
  for (const auto& p : kPairs) {
    const WristbandDensity d(p.alpha, p.beta);
    const auto rep = verifyDensityIdentities(d, grid(p.alpha, p.beta, 1000, 0.01 * (p.alpha + p.beta)));
    ASSERT_EQ(rep.families.size(), 3u);
    EXPECT_TRUE(rep.passed());
    for (const auto& f : rep.families) {
      EXPECT_TRUE(f.passed) << f.name << " worst " << f.worstError << " at s = " << f.worstS;
      EXPECT_LE(f.worstError, 1e-8);
      EXPECT_GT(f.points, 0u);
    }
  }
}

TEST(Identities, PerturbedDensityFails) {
  const WristbandDensity bad(1.0, 1.0, 1.01);
  const auto rep = verifyDensityIdentities(bad, grid(1.0, 1.0, 1000, 0.02));
  EXPECT_FALSE(rep.passed());
  for (const auto& f : rep.families) EXPECT_FALSE(f.passed) << f.name;
}

TEST(Identities, GridOutsideSupportRejected) {
  EXPECT_THROW(verifyDensityIdentities(WristbandDensity(1.0, 1.0), {-1.0, 0.0}), InvalidInput);
}
