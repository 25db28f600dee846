#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "sbm/domain.hpp"
#include "sbm/error.hpp"

using namespace sbm;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Domain band() { return Domain::wristband(kTwoPi, 1.0); }

void expectVecNear(const Vec& a, const Vec& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "component " << i;
}

}  // namespace

TEST(Classify, WristbandExamples) {
  const Domain d = band();
  EXPECT_EQ(d.classify(vec({0.3, 0.0})), Region::Interior);
  EXPECT_EQ(d.classify(vec({5.0, 1.0})), Region::Boundary);
  EXPECT_EQ(d.classify(vec({0.0, 1.5})), Region::Exterior);
  EXPECT_EQ(d.classify(vec({0.0, -1.0})), Region::Boundary);
}

TEST(Classify, ToleranceBand) {
  const Domain d = Domain::wristband(kTwoPi, 1.0, 1e-6);
  EXPECT_EQ(d.classify(vec({0.0, 1.0 - 5e-7})), Region::Boundary);
  EXPECT_EQ(d.classify(vec({0.0, 1.0 + 5e-7})), Region::Boundary);
  EXPECT_EQ(d.classify(vec({0.0, 1.0 + 2e-6})), Region::Exterior);
  EXPECT_EQ(d.classify(vec({0.0, 1.0 - 2e-6})), Region::Interior);
}

TEST(Classify, NonFiniteIsInvalid) {
  const Domain d = band();
  EXPECT_THROW(d.classify(vec({std::numeric_limits<double>::quiet_NaN(), 0.0})), InvalidInput);
  EXPECT_THROW(d.classify(vec({0.0, std::numeric_limits<double>::infinity()})), InvalidInput);
  EXPECT_THROW(Domain::unitDisk().classify(vec({std::nan(""), 0.0})), InvalidInput);
}

TEST(Classify, Disk) {
  const Domain d = Domain::unitDisk();
  EXPECT_EQ(d.classify(vec({0.0, 0.0})), Region::Interior);
  EXPECT_EQ(d.classify(vec({1.0, 0.0})), Region::Boundary);
  EXPECT_EQ(d.classify(vec({1.2, 0.0})), Region::Exterior);
}

TEST(InwardNormal, Examples) {
  const Domain d = band();
  expectVecNear(d.inwardNormal(vec({1.0, 1.0})), vec({0.0, -1.0}), 0.0);
  expectVecNear(d.inwardNormal(vec({1.0, -1.0})), vec({0.0, 1.0}), 0.0);
  expectVecNear(Domain::unitDisk().inwardNormal(vec({1.0, 0.0})), vec({-1.0, 0.0}), 1e-15);
}

TEST(InwardNormal, InteriorPointIsDomainError) {
  EXPECT_THROW(band().inwardNormal(vec({0.0, 0.2})), DomainError);
  EXPECT_THROW(Domain::unitDisk().inwardNormal(vec({0.1, 0.2})), DomainError);
}

TEST(InwardNormal, UnitAndPointsInward) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  const Domain disk = Domain::unitDisk();
  const Domain w = band();
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng);
    const Vec xb = vec({std::cos(a), std::sin(a)});
    const Vec n = disk.inwardNormal(xb);
    EXPECT_NEAR(n.norm(), 1.0, 1e-14);
    for (double t : {1e-3, 1e-6}) EXPECT_EQ(disk.classify(xb + t * n), Region::Interior);

    const Vec wb = vec({a, k % 2 ? 1.0 : -1.0});
    const Vec wn = w.inwardNormal(wb);
    EXPECT_DOUBLE_EQ(wn.norm(), 1.0);
    for (double t : {1e-3, 1e-6}) EXPECT_EQ(w.classify(wb + t * wn), Region::Interior);
  }
}

TEST(Project, Examples) {
  const Domain d = band();
  auto p = d.projectToClosure(vec({0.2, 1.3}));
  expectVecNear(p.point, vec({0.2, 1.0}), 0.0);
  EXPECT_NEAR(p.pushDistance, 0.3, 1e-15);

  p = d.projectToClosure(vec({0.2, 0.5}));
  expectVecNear(p.point, vec({0.2, 0.5}), 0.0);
  EXPECT_EQ(p.pushDistance, 0.0);

  p = Domain::unitDisk().projectToClosure(vec({1.5, 0.0}));
  expectVecNear(p.point, vec({1.0, 0.0}), 1e-12);
  EXPECT_NEAR(p.pushDistance, 0.5, 1e-12);
}

TEST(Project, BeyondReachIsGeometryError) {
  EXPECT_THROW(Domain::unitDisk().projectToClosure(vec({5.0, 0.0})), GeometryError);
}

TEST(Project, IdempotentAndPushIsDistance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  const Domain disk = Domain::unitDisk();
  const Domain w = band();
  for (int k = 0; k < 2000; ++k) {
    const Vec x = vec({u(rng), u(rng)});
    for (const Domain* d : {&disk, &w}) {
      const Projection p = d->projectToClosure(x);
      EXPECT_NEAR(p.pushDistance, (x - p.point).norm(), 1e-12);
      EXPECT_EQ(p.pushDistance == 0.0, d->inClosure(x));
      const Projection again = d->projectToClosure(p.point);
      EXPECT_LE(again.pushDistance, 1e-12);
      EXPECT_NE(d->classify(p.point), Region::Exterior);
    }
  }
}

TEST(Wrap, Examples) {
  const Domain d = band();
  expectVecNear(d.wrap(vec({7.0, 0.3})), vec({7.0 - kTwoPi, 0.3}), 1e-15);
  expectVecNear(d.wrap(vec({0.0, 0.3})), vec({0.0, 0.3}), 0.0);
  expectVecNear(d.wrap(vec({-0.5, -0.2})), vec({kTwoPi - 0.5, -0.2}), 1e-15);
}

TEST(Wrap, OnlyOnWristband) { EXPECT_THROW(Domain::unitDisk().wrap(vec({0.1, 0.1})), UnsupportedOperation); }

TEST(Wrap, IdempotentAndDistanceInvariant) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-50.0, 50.0), y(-1.0, 1.0);
  const Domain d = band();
  for (int k = 0; k < 2000; ++k) {
    const Vec a = vec({u(rng), y(rng)});
    const Vec b = vec({u(rng), y(rng)});
    const Vec wa = d.wrap(a);
    EXPECT_GE(wa[0], 0.0);
    EXPECT_LT(wa[0], kTwoPi);
    EXPECT_EQ(d.wrap(wa), wa);
    EXPECT_NEAR(d.distance(a, b), d.distance(wa, d.wrap(b)), 1e-9);
    const Vec shifted = b + vec({kTwoPi * 3.0, 0.0});
    EXPECT_NEAR(d.distance(a, b), d.distance(a, shifted), 1e-9);
    EXPECT_LE(std::abs(d.displacement(a, b)[0]), 0.5 * kTwoPi + 1e-12);
  }
}

TEST(Geometry, BoundaryDistanceAndInradius) {
  const Domain w = Domain::wristband(kTwoPi, 2.0);
  EXPECT_DOUBLE_EQ(w.boundaryDistance(vec({1.0, 0.5})), 1.5);
  EXPECT_DOUBLE_EQ(w.inradius(), 2.0);
  const Domain disk = Domain::unitDisk();
  EXPECT_NEAR(disk.boundaryDistance(vec({0.3, 0.4})), 0.5, 1e-9);
  EXPECT_NEAR(disk.inradius(), 1.0, 1e-12);
}

TEST(Geometry, SampleBoundaryLiesOnBoundary) {
  for (const Domain& d : {band(), Domain::unitDisk()}) {
    const auto pts = d.sampleBoundary(64);
    ASSERT_EQ(pts.size(), 64u);
    for (const auto& x : pts) EXPECT_EQ(d.classify(x), Region::Boundary);
  }
}

TEST(Construct, RejectsBadParameters) {
  EXPECT_THROW(Domain::wristband(0.0, 1.0), InvalidInput);
  EXPECT_THROW(Domain::wristband(kTwoPi, -1.0), InvalidInput);
  EXPECT_THROW(Domain::wristband(kTwoPi, 1.0, 0.0), InvalidInput);
  EXPECT_THROW(Domain::smoothPhi(SmoothPhi{}), InvalidInput);
}
