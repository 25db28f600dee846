#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "sbm/error.hpp"
#include "sbm/excursions.hpp"

using namespace sbm;
using oracle::ScriptedStep;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Domain band() { return Domain::wristband(kTwoPi, 1.0); }

ScriptedStep contact(double x, bool top, double dL = 0.01) {
  return {vec({x, top ? 1.0 : -1.0}), vec({0.0}), dL, top ? Wall::Top : Wall::Bottom};
}
ScriptedStep inside(double x, double y) { return {vec({x, y}), vec({0.0}), 0.0, Wall::None}; }

// A contact, then for each depth a 9-step dip below the top wall followed by a contact.
std::vector<ScriptedStep> dips(const std::vector<double>& depths) {
  std::vector<ScriptedStep> out{contact(0.0, true)};
  for (double depth : depths) {
    for (int k = 1; k <= 9; ++k) out.push_back(inside(0.01 * k, 1.0 - depth * std::sin(std::numbers::pi * k / 10.0)));
    out.push_back(contact(0.0, true));
  }
  return out;
}

ExcursionSet track(const std::vector<ScriptedStep>& steps, double dt = 0.001, Vec x0 = vec({0.0, 0.0})) {
  const Domain d = band();
  ExcursionTracker t(d);
  oracle::replay(t, dt, x0, vec({0.0}), steps);
  return t.take();
}

std::size_t completeCount(const ExcursionSet& s) {
  return static_cast<std::size_t>(
      std::count_if(s.records.begin(), s.records.end(), [](const ExcursionRecord& r) { return !r.partial; }));
}

void expectPartition(const ExcursionSet& s) {
  const auto& p = s.partition;
  EXPECT_NEAR(p.completeTime + p.contactTime + p.partialTime, p.span, 1e-9 * std::max(1.0, p.span));
}

}  // namespace

TEST(Decompose, AlwaysInContactGivesNoRecords) {
  std::vector<ScriptedStep> steps;
  for (int k = 0; k < 50; ++k) steps.push_back(contact(0.0, k % 2 == 0));
  const ExcursionSet s = track(steps, 0.001, vec({0.0, 1.0}));
  EXPECT_TRUE(s.records.empty());
  expectPartition(s);
  EXPECT_NEAR(s.partition.contactTime, 0.049, 1e-12);
}

TEST(Decompose, NoContactGivesNoRecords) {
  std::vector<ScriptedStep> steps;
  for (int k = 0; k < 50; ++k) steps.push_back(inside(0.0, 0.3));
  const ExcursionSet s = track(steps);
  EXPECT_TRUE(s.records.empty());
  EXPECT_NEAR(s.partition.partialTime, s.partition.span, 0.0);
}

TEST(Decompose, SingleExcursionFixture) {
  std::vector<ScriptedStep> steps{contact(0.0, true)};
  for (int k = 1; k <= 10; ++k) steps.push_back(inside(0.01 * k, k == 5 ? 0.5 : 0.9));
  steps.push_back(contact(0.2, true));
  const ExcursionSet s = track(steps, 0.001, vec({0.0, 1.0}));
  ASSERT_EQ(s.records.size(), 1u);
  const ExcursionRecord& r = s.records.front();
  EXPECT_FALSE(r.partial);
  EXPECT_NEAR(r.maxDepth, 0.5, 1e-15);
  EXPECT_NEAR(r.lifetime(), 0.011, 1e-12);
  EXPECT_EQ(r.startWall, Wall::Top);
  EXPECT_EQ(r.startPoint, vec({0.0, 1.0}));
  EXPECT_EQ(r.endPoint, vec({0.2, 1.0}));
  expectPartition(s);
}

TEST(Decompose, PartialSegmentsAreFlagged) {
  std::vector<ScriptedStep> steps{inside(0.0, 0.2), inside(0.0, 0.1), contact(0.0, false)};
  for (int k = 0; k < 5; ++k) steps.push_back(inside(0.0, -0.7));
  steps.push_back(contact(0.0, true));
  for (int k = 0; k < 3; ++k) steps.push_back(inside(0.0, 0.9));
  const ExcursionSet s = track(steps);
  ASSERT_EQ(s.records.size(), 3u);
  EXPECT_TRUE(s.records.front().partial);
  EXPECT_FALSE(s.records[1].partial);
  EXPECT_EQ(s.records[1].startWall, Wall::Bottom);
  EXPECT_TRUE(s.records.back().partial);
  EXPECT_EQ(completeCount(s), 1u);
  expectPartition(s);
  EXPECT_EQ(countAEps(s.records, 0.01, 1e9), 1u);
}

TEST(CountAEps, Examples) {
  std::vector<ExcursionRecord> recs;
  for (double depth : {0.1, 0.4, 0.6}) {
    ExcursionRecord r;
    r.startTime = depth;
    r.endTime = depth + 0.05;
    r.maxDepth = depth;
    recs.push_back(r);
  }
  EXPECT_EQ(countAEps(recs, 0.3, 10.0), 2u);
  EXPECT_EQ(countAEps(recs, 0.7, 10.0), 0u);
  EXPECT_EQ(countAEps(recs, 0.05, 0.45), 2u);
  recs[2].partial = true;
  EXPECT_EQ(countAEps(recs, 0.3, 10.0), 1u);
}

TEST(CountAEps, NonIncreasingInEps) {
  const ExcursionSet s = track(dips({0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.8}));
  std::size_t prev = s.records.size() + 1;
  for (double eps = 0.01; eps < 1.0; eps += 0.01) {
    const std::size_t n = countAEps(s.records, eps, 1e9);
    EXPECT_LE(n, prev);
    prev = n;
  }
}

TEST(ExitRates, SingleEpsEqualsCountOverLocalTime) {
  const Domain d = band();
  const ExcursionSet s = track(dips({0.1, 0.3, 0.5, 0.7}), 1e-4);
  const auto rows = exitRates(s, d, {0.2});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].count, countAEps(s.records, 0.2, 1e9));
  EXPECT_DOUBLE_EQ(rows[0].rate, static_cast<double>(rows[0].count) / s.localTime);
  EXPECT_NEAR(s.localTime, 0.05, 1e-12);
}

TEST(ExitRates, InvariantUnderRecordReversal) {
  const Domain d = band();
  ExcursionSet s = track(dips({0.1, 0.3, 0.5, 0.7, 0.25}), 1e-4);
  const auto a = exitRates(s, d, {0.05, 0.2, 0.4});
  std::reverse(s.records.begin(), s.records.end());
  const auto b = exitRates(s, d, {0.05, 0.2, 0.4});
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].count, b[i].count);
    EXPECT_EQ(a[i].rate, b[i].rate);
  }
}

TEST(ExitRates, ErrorsAndFloor) {
  const Domain d = band();
  const ExcursionSet s = track(dips({0.3}), 1e-4);
  EXPECT_THROW(exitRates(s, d, {0.04}), InvalidInput);  // below 5 sqrt(1e-4)
  EXPECT_NO_THROW(exitRates(s, d, {0.05}));
  EXPECT_THROW(exitRates(s, d, {1.0}), InvalidInput);
  EXPECT_THROW(exitRates(s, d, {}), InvalidInput);
  std::vector<ScriptedStep> flat(20, inside(0.0, 0.0));
  EXPECT_THROW(exitRates(track(flat, 1e-4), d, {0.1}), InsufficientData);
}

TEST(ExitRates, LogLogSlopeOfExactPowerLaw) {
  std::vector<RateRow> rows;
  for (double eps : {0.05, 0.1, 0.2, 0.4}) rows.push_back({eps, 100, 1.0, 3.0 / eps});
  EXPECT_NEAR(logLogSlope(rows), -1.0, 1e-12);
  rows[1].count = 0;
  EXPECT_THROW(logLogSlope(rows), InsufficientData);
}

TEST(ExitRates, PoolingAddsCountsAndLocalTimes) {
  const std::vector<RateRow> a{{0.1, 10, 2.0, 5.0}, {0.2, 4, 2.0, 2.0}};
  const std::vector<RateRow> b{{0.1, 20, 3.0, 20.0 / 3.0}, {0.2, 6, 3.0, 2.0}};
  const auto p = poolRates({a, b});
  EXPECT_EQ(p[0].count, 30u);
  EXPECT_DOUBLE_EQ(p[0].localTime, 5.0);
  EXPECT_DOUBLE_EQ(p[0].rate, 6.0);
  EXPECT_THROW(poolRates({a, {{0.1, 1, 1.0, 1.0}}}), InvalidInput);
}

TEST(ExitRates, CsvHeader) {
  std::ostringstream out;
  writeRateCsv(out, {{0.1, 3, 1.5, 2.0}});
  EXPECT_EQ(out.str(), "eps,count,local_time,rate\n0.1,3,1.5,2\n");
}

TEST(Decompose, SimulatedWristbandRecords) {
  const Domain d = band();
  const FieldSet f = presets::wristbandOneDimSpin(d, 1.0, 1.0, 1.0);
  SimConfig c;
  c.dt = 1e-3;
  c.horizon = 200.0;
  c.seed = 17;
  c.initialX = vec({0.0, 0.0});
  c.initialS = vec({0.0});
  const Trajectory traj = simulate(c, d, f);
  const ExcursionSet s = decomposeSet(traj, d);
  ASSERT_GT(s.records.size(), 100u);
  expectPartition(s);
  EXPECT_NEAR(s.partition.span, 200.0, 1e-6);
  for (const auto& r : s.records) {
    EXPECT_GT(r.lifetime(), 0.0);
    EXPECT_LE(r.maxDepth, d.inradius());
    if (!r.partial) {
      EXPECT_EQ(std::abs(r.startPoint[1]), 1.0);
      EXPECT_EQ(std::abs(r.endPoint[1]), 1.0);
    }
  }
  EXPECT_NEAR(s.localTime, traj.localTime.back(), 1e-9);
  EXPECT_NEAR(s.localTimeTop + s.localTimeBottom, s.localTime, 1e-9);

  // Streaming tracker and replay of the recorded trajectory agree.
  ExcursionTracker live(d);
  simulate(c, d, f, live);
  const ExcursionSet& l = live.result();
  ASSERT_EQ(l.records.size(), s.records.size());
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    if (s.records[i].partial) continue;  // the replay starts from the first record, not the initial state
    EXPECT_EQ(l.records[i].startTime, s.records[i].startTime);
    EXPECT_EQ(l.records[i].maxDepth, s.records[i].maxDepth);
    EXPECT_EQ(l.records[i].startWall, s.records[i].startWall);
  }
  EXPECT_THROW(decomposeSet([&] {
                 Trajectory t = traj;
                 t.recordStride = 2;
                 return t;
               }(),
                            d),
               InvalidInput);
}

TEST(ExitRates, ReflectedBmScalesLikeOneOverEps) {
  // Smoke-scale version of the long-run check: pure reflected BM, horizon 500 at dt 1e-4.
  const Domain d = band();
  const FieldSet f = wristbandFields(d, FourierProfile::constant(vec({0.0})), FourierProfile::constant(vec({0.0})),
                                     1.0, TauProfile::zero(), TauProfile::zero());
  SimConfig c;
  c.dt = 1e-4;
  c.horizon = 500.0;
  c.seed = 99;
  c.initialX = vec({0.0, 0.0});
  c.initialS = vec({0.0});
  ExcursionTracker t(d, 0.05);
  simulate(c, d, f, t);
  const auto rows = exitRates(t.result(), d, {0.05, 0.1, 0.2, 0.4});
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].rate, rows[i - 1].rate);
  const double slope = logLogSlope(rows);
  EXPECT_GT(slope, -1.15);
  EXPECT_LT(slope, -0.85);
  EXPECT_GT(t.result().droppedShallow, 0u);
}
