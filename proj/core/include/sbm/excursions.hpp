#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "sbm/domain.hpp"
#include "sbm/integrator.hpp"
#include "sbm/linalg.hpp"

namespace sbm {

/// One excursion from the boundary, between two contact steps.
/// Partial records are the open segments before the first and after the last contact.
struct ExcursionRecord {
  double startTime = 0.0;
  double endTime = 0.0;
  Vec startPoint;
  Vec endPoint;
  double maxDepth = 0.0;
  Wall startWall = Wall::None;
  bool partial = false;

  double lifetime() const { return endTime - startTime; }
};

/// How the observed time splits up. completeTime + contactTime + partialTime is the
/// observed span; contactTime counts the gaps between adjacent contact steps.
struct ExcursionPartition {
  double completeTime = 0.0;
  double contactTime = 0.0;
  double partialTime = 0.0;
  double span = 0.0;
};

struct ExcursionSet {
  std::vector<ExcursionRecord> records;
  ExcursionPartition partition;
  double dt = 0.0;
  double localTime = 0.0;
  double localTimeTop = 0.0;
  double localTimeBottom = 0.0;
  /// Complete excursions discarded by the tracker's depth filter.
  std::size_t droppedShallow = 0;
};

/// Streams a run and cuts it into excursions at steps with dL > 0. Complete records
/// shallower than `minDepth` are counted but not stored.
class ExcursionTracker : public StepObserver {
 public:
  explicit ExcursionTracker(const Domain& d, double minDepth = 0.0);

  void onStart(const SimConfig& cfg, const StepRecord& initial) override;
  void onStep(const StepRecord& rec) override;
  void onFinish() override;

  const ExcursionSet& result() const { return set_; }
  ExcursionSet take() { return std::move(set_); }

 private:
  void close(double endTime, const Vec& endPoint, bool partial);

  const Domain* domain_;
  double minDepth_;
  ExcursionSet set_;
  bool contacted_ = false;
  std::size_t interiorSteps_ = 0;
  double segStart_ = 0.0;
  Vec segPoint_;
  Wall segWall_ = Wall::None;
  double segDepth_ = 0.0;
  double lastT_ = 0.0;
  Vec lastX_;
  double t0_ = 0.0;
};

/// Replays a stride-1 trajectory through ExcursionTracker.
ExcursionSet decomposeSet(const Trajectory& traj, const Domain& d);
/// Complete and partial records of a trajectory; empty when the path never touches the boundary.
std::vector<ExcursionRecord> decompose(const Trajectory& traj, const Domain& d);

/// Complete records with startTime < before and maxDepth > eps.
std::size_t countAEps(const std::vector<ExcursionRecord>& records, double eps, double before);

enum class WallFilter { Any, Top, Bottom };

struct RateRow {
  double eps = 0.0;
  std::size_t count = 0;
  double localTime = 0.0;
  double rate = 0.0;
};

/// N_eps / L for each eps, counting excursions that start on the selected wall against
/// that wall's local time. eps must be at least 5 sqrt(dt) and below the inradius.
std::vector<RateRow> exitRates(const ExcursionSet& set, const Domain& d, const std::vector<double>& epsGrid,
                               WallFilter wall = WallFilter::Any);
std::vector<RateRow> exitRateEstimate(const Trajectory& traj, const Domain& d, const std::vector<double>& epsGrid,
                                      WallFilter wall = WallFilter::Any);

/// Pools counts and local times of several chains (rows aligned by eps).
std::vector<RateRow> poolRates(const std::vector<std::vector<RateRow>>& chains);

/// Least-squares slope of log(rate) against log(eps).
double logLogSlope(const std::vector<RateRow>& rows);

/// Header `eps,count,local_time,rate`.
void writeRateCsv(std::ostream& out, const std::vector<RateRow>& rows);

}  // namespace sbm
