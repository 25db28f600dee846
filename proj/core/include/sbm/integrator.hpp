#pragma once

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cstdint>
#include <vector>

#include "sbm/domain.hpp"
#include "sbm/fields.hpp"
#include "sbm/linalg.hpp"

namespace sbm {

enum class ReflectionScheme {
  /// Project, then push tangentially from the projected point with the pre-step spin;
  /// spin advanced with the exact exponential flow.
  HalfStep,
  /// Same positions, but the spin is advanced by explicit Euler s + (g - alpha s) dL.
  /// Kept for bias studies; it does not preserve the damping bound for large dL.
  Naive,
};

enum class Wall : std::uint8_t { None, Top, Bottom, Other };

struct SimConfig {
  double dt = 1e-4;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  double burnIn = 0.0;
  std::size_t recordStride = 1;
  Vec initialX;
  Vec initialS;
  ReflectionScheme scheme = ReflectionScheme::HalfStep;
  /// Each increment is the sum of this many draws of variance dt / substeps. A run with
  /// (dt, 2) sees the same Brownian path as a run with (dt / 2, 1) and the same seed.
  int brownianSubsteps = 1;

  /// Number of steps: horizon / dt rounded to the nearest integer.
  std::int64_t stepCount() const;
  /// First step index that is recorded (t_k >= burnIn).
  std::int64_t firstRecordedStep() const;
  void validate() const;
};

/// State after step `step` (step 0 is the initial condition).
struct StepRecord {
  std::int64_t step = 0;
  double t = 0.0;
  Vec x;
  Vec s;
  double L = 0.0;
  double dL = 0.0;
  Wall wall = Wall::None;
};

/// Receives every step of a run, in order. Implementations decide what to keep.
class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void onStart(const SimConfig& /*cfg*/, const StepRecord& /*initial*/) {}
  virtual void onStep(const StepRecord& rec) = 0;
  virtual void onFinish() {}
};

/// Fans one stream out to several observers.
class ObserverList : public StepObserver {
 public:
  explicit ObserverList(std::vector<StepObserver*> observers) : observers_(std::move(observers)) {}
  void onStart(const SimConfig& cfg, const StepRecord& initial) override;
  void onStep(const StepRecord& rec) override;
  void onFinish() override;

 private:
  std::vector<StepObserver*> observers_;
};

/// Recorded samples of (X, S, L). Wall-resolved local times are present on the wristband.
struct Trajectory {
  double dt = 0.0;
  std::size_t recordStride = 1;
  /// State just before the first recorded sample.
  double startTime = 0.0;
  double startLocalTime = 0.0;
  double horizon = 0.0;

  std::vector<double> times;
  std::vector<Vec> positions;
  std::vector<Vec> spins;
  std::vector<double> localTime;
  std::vector<double> localTimeTop;
  std::vector<double> localTimeBottom;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  bool hasWallLocalTimes() const { return !localTimeTop.empty(); }
  /// Time represented by each record: dt * recordStride.
  double recordWeight() const { return dt * static_cast<double>(recordStride); }
};

/// Keeps every recordStride-th step at or after the burn-in.
class TrajectoryRecorder : public StepObserver {
 public:
  explicit TrajectoryRecorder(bool wallLocalTimes);
  void onStart(const SimConfig& cfg, const StepRecord& initial) override;
  void onStep(const StepRecord& rec) override;
  Trajectory take() { return std::move(traj_); }
  const Trajectory& trajectory() const { return traj_; }

 private:
  bool wallLocalTimes_;
  std::int64_t first_ = 1;
  std::size_t stride_ = 1;
  double top_ = 0.0, bottom_ = 0.0;
  double lastL_ = 0.0, lastT_ = 0.0;
  Trajectory traj_;
};

/// Exact solution of dS = (g - alpha S) dL over a local-time increment dL at a fixed boundary point.
Vec spinUpdate(const Vec& s, const Vec& gVal, double alphaVal, double dL);

struct ReflectedState {
  Vec x;
  Vec s;
  double L = 0.0;
};

struct StepOutcome {
  Vec x;
  Vec s;
  double L = 0.0;
  double dL = 0.0;
  Wall wall = Wall::None;
};

/// One projected-Euler step of the reflected system from `state` with Brownian increment dB
/// (already scaled by sqrt(dt)). Throws GeometryError when the tentative point overshoots
/// beyond the opposite wall or the projection reach.
StepOutcome reflectedStep(const ReflectedState& state, const Vec& dB, const FieldSet& f, const Domain& d,
                          ReflectionScheme scheme = ReflectionScheme::HalfStep);

/// Seeded source of standard normal variates (Mersenne Twister 64 + ziggurat).
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return normal_(engine_); }
  /// Generator and sampling method, as written into run reports.
  static constexpr const char* kMethod = "boost mt19937_64, ziggurat normal";

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

struct SimSummary {
  std::int64_t steps = 0;
  Vec finalX;
  Vec finalS;
  double finalL = 0.0;
  double localTimeTop = 0.0;
  double localTimeBottom = 0.0;
  std::int64_t contactSteps = 0;
  std::int64_t halvedSteps = 0;
  double wallSeconds = 0.0;
};

/// Runs one chain and streams every step to `observer`. Deterministic in (cfg, d, f).
SimSummary simulate(const SimConfig& cfg, const Domain& d, const FieldSet& f, StepObserver& observer);

/// Convenience overload returning the recorded trajectory.
Trajectory simulate(const SimConfig& cfg, const Domain& d, const FieldSet& f);

}  // namespace sbm
