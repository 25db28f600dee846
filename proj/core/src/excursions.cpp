#include "sbm/excursions.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sbm/csv.hpp"
#include "sbm/error.hpp"

namespace sbm {

ExcursionTracker::ExcursionTracker(const Domain& d, double minDepth) : domain_(&d), minDepth_(minDepth) {}

void ExcursionTracker::onStart(const SimConfig& cfg, const StepRecord& initial) {
  set_ = ExcursionSet{};
  set_.dt = cfg.dt;
  contacted_ = false;
  interiorSteps_ = 0;
  t0_ = lastT_ = segStart_ = initial.t;
  segPoint_ = initial.x;
  lastX_ = initial.x;
  segWall_ = Wall::None;
  segDepth_ = domain_->inClosure(initial.x) ? domain_->boundaryDistance(initial.x) : 0.0;
}

void ExcursionTracker::close(double endTime, const Vec& endPoint, bool partial) {
  const double life = endTime - segStart_;
  if (partial) {
    set_.partition.partialTime += life;
  } else {
    set_.partition.completeTime += life;
    if (segDepth_ < minDepth_) {
      ++set_.droppedShallow;
      return;
    }
  }
  set_.records.push_back({segStart_, endTime, segPoint_, endPoint, segDepth_, segWall_, partial});
}

void ExcursionTracker::onStep(const StepRecord& rec) {
  if (rec.dL > 0.0) {
    set_.localTime += rec.dL;
    if (rec.wall == Wall::Top) set_.localTimeTop += rec.dL;
    if (rec.wall == Wall::Bottom) set_.localTimeBottom += rec.dL;
    if (!contacted_) {
      // Starting on the boundary gives no initial excursion, only a sliver of partial time.
      if (interiorSteps_ == 0) {
        set_.partition.partialTime += rec.t - segStart_;
      } else {
        close(rec.t, rec.x, true);
      }
    } else if (interiorSteps_ == 0) {
      set_.partition.contactTime += rec.t - segStart_;
    } else {
      close(rec.t, rec.x, false);
    }
    contacted_ = true;
    interiorSteps_ = 0;
    segStart_ = rec.t;
    segPoint_ = rec.x;
    segWall_ = rec.wall;
    segDepth_ = 0.0;
  } else {
    segDepth_ = std::max(segDepth_, domain_->boundaryDistance(rec.x));
    ++interiorSteps_;
  }
  lastT_ = rec.t;
  lastX_ = rec.x;
}

void ExcursionTracker::onFinish() {
  set_.partition.span = lastT_ - t0_;
  if (!contacted_) {
    // A path that never touched the boundary has no excursion structure.
    set_.records.clear();
    set_.partition.partialTime = set_.partition.span;
    return;
  }
  if (lastT_ > segStart_) close(lastT_, lastX_, true);
}

ExcursionSet decomposeSet(const Trajectory& traj, const Domain& d) {
  if (traj.recordStride != 1) throw InvalidInput("excursion statistics need record_stride = 1");
  ExcursionTracker tracker(d);
  SimConfig cfg;
  cfg.dt = traj.dt;
  StepRecord rec;
  if (traj.empty()) {
    tracker.onStart(cfg, rec);
    tracker.onFinish();
    return tracker.take();
  }
  rec.t = traj.startTime;
  rec.x = traj.positions.front();
  rec.L = traj.startLocalTime;
  tracker.onStart(cfg, rec);
  double prevL = traj.startLocalTime;
  double prevTop = 0.0;
  const bool walls = traj.hasWallLocalTimes();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    rec.step = static_cast<std::int64_t>(i + 1);
    rec.t = traj.times[i];
    rec.x = traj.positions[i];
    rec.s = traj.spins[i];
    rec.L = traj.localTime[i];
    rec.dL = rec.L - prevL;
    rec.wall = Wall::None;
    if (rec.dL > 0.0) {
      if (!d.isWristband()) {
        rec.wall = Wall::Other;
      } else if (walls) {
        // The first record's wall split is taken from its position.
        const bool top = i == 0 ? rec.x[1] > 0.0 : traj.localTimeTop[i] > prevTop;
        rec.wall = top ? Wall::Top : Wall::Bottom;
      } else {
        rec.wall = rec.x[1] > 0.0 ? Wall::Top : Wall::Bottom;
      }
    }
    if (walls) prevTop = traj.localTimeTop[i];
    prevL = rec.L;
    tracker.onStep(rec);
  }
  tracker.onFinish();
  return tracker.take();
}

std::vector<ExcursionRecord> decompose(const Trajectory& traj, const Domain& d) {
  return decomposeSet(traj, d).records;
}

std::size_t countAEps(const std::vector<ExcursionRecord>& records, double eps, double before) {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [&](const ExcursionRecord& r) {
    return !r.partial && r.startTime < before && r.maxDepth > eps;
  }));
}

std::vector<RateRow> exitRates(const ExcursionSet& set, const Domain& d, const std::vector<double>& epsGrid,
                               WallFilter wall) {
  if (epsGrid.empty()) throw InvalidInput("empty eps grid");
  const double floor = 5.0 * std::sqrt(set.dt);
  for (double eps : epsGrid) {
    if (!(eps > 0.0) || eps >= d.inradius()) throw InvalidInput("eps must lie in (0, inradius)");
    if (eps < floor * (1.0 - 1e-12)) throw InvalidInput("eps below the resolution floor 5 sqrt(dt)");
  }
  double local = set.localTime;
  if (wall == WallFilter::Top) local = set.localTimeTop;
  if (wall == WallFilter::Bottom) local = set.localTimeBottom;
  if (!(local > 0.0)) throw InsufficientData("no boundary local time accumulated");

  std::vector<RateRow> rows;
  for (double eps : epsGrid) {
    std::size_t n = 0;
    for (const auto& r : set.records) {
      if (r.partial || !(r.maxDepth > eps)) continue;
      if (wall == WallFilter::Top && r.startWall != Wall::Top) continue;
      if (wall == WallFilter::Bottom && r.startWall != Wall::Bottom) continue;
      ++n;
    }
    rows.push_back({eps, n, local, static_cast<double>(n) / local});
  }
  return rows;
}

std::vector<RateRow> exitRateEstimate(const Trajectory& traj, const Domain& d, const std::vector<double>& epsGrid,
                                      WallFilter wall) {
  return exitRates(decomposeSet(traj, d), d, epsGrid, wall);
}

std::vector<RateRow> poolRates(const std::vector<std::vector<RateRow>>& chains) {
  if (chains.empty()) throw InsufficientData("no chains to pool");
  std::vector<RateRow> out = chains.front();
  for (std::size_t c = 1; c < chains.size(); ++c) {
    if (chains[c].size() != out.size()) throw InvalidInput("rate tables have different eps grids");
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (chains[c][i].eps != out[i].eps) throw InvalidInput("rate tables have different eps grids");
      out[i].count += chains[c][i].count;
      out[i].localTime += chains[c][i].localTime;
    }
  }
  for (auto& r : out) r.rate = static_cast<double>(r.count) / r.localTime;
  return out;
}

double logLogSlope(const std::vector<RateRow>& rows) {
  if (rows.size() < 2) throw InsufficientData("slope needs at least two eps values");
  double mx = 0.0, my = 0.0;
  for (const auto& r : rows) {
    if (r.count == 0) throw InsufficientData("an eps value has no excursions");
    mx += std::log(r.eps);
    my += std::log(r.rate);
  }
  mx /= static_cast<double>(rows.size());
  my /= static_cast<double>(rows.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& r : rows) {
    const double dx = std::log(r.eps) - mx;
    sxy += dx * (std::log(r.rate) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) throw InvalidInput("eps values must differ");
  return sxy / sxx;
}

void writeRateCsv(std::ostream& out, const std::vector<RateRow>& rows) {
  out << "eps,count,local_time,rate\n";
  for (const auto& r : rows) {
    out << formatReal(r.eps) << ',' << r.count << ',' << formatReal(r.localTime) << ',' << formatReal(r.rate)
        << '\n';
  }
}

}  // namespace sbm
