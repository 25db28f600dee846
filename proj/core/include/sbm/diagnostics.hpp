#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "sbm/domain.hpp"
#include "sbm/fields.hpp"
#include "sbm/integrator.hpp"
#include "sbm/polytope.hpp"

namespace sbm {

/// v(t) = sum_j exp(-sum_{k>=j} alpha_k t_k) (g_j / alpha_j) (exp(alpha_j t_j) - 1).
Vec spinReachMap(const std::vector<double>& alphaValues, const std::vector<Vec>& gVectors, const Vec& t);

/// Largest relative error between det Dv(t) (central differences, step 1e-6) and
/// det(T_g) exp(-sum_k k alpha_k t_k) over the given points. T_g has columns g_j.
double jacobianCheck(const std::vector<double>& alphaValues, const std::vector<Vec>& gVectors,
                     const std::vector<Vec>& tPoints);

/// Watches |S|^2 <= |S_0|^2 exp(-alpha0 L) + (|g|_inf / alpha0)^2 + tol on every step.
class DampingBoundMonitor : public StepObserver {
 public:
  DampingBoundMonitor(double gSupNorm, double alphaInf, double tol = 1e-9);
  void onStart(const SimConfig& cfg, const StepRecord& initial) override;
  void onStep(const StepRecord& rec) override;

  std::int64_t violations() const { return violations_; }
  std::int64_t checked() const { return checked_; }
  /// Largest |S|^2 - bound seen (negative when the bound always held with room to spare).
  double worstExcess() const { return worst_; }

 private:
  double radius2_, alphaInf_, tol_;
  double s0sq_ = 0.0;
  std::int64_t violations_ = 0, checked_ = 0;
  double worst_ = -1e300;
};

/// Counts spins within `dist` of a polytope after the burn-in step. The spin only moves on
/// contact steps, so the distance is recomputed only there.
class HullProximityCounter : public StepObserver {
 public:
  HullProximityCounter(const Polytope& hull, double dist) : hull_(&hull), dist_(dist) {}
  void onStart(const SimConfig& cfg, const StepRecord& initial) override;
  void onStep(const StepRecord& rec) override;

  std::int64_t inside() const { return inside_; }
  std::int64_t total() const { return total_; }
  double fraction() const { return total_ ? static_cast<double>(inside_) / static_cast<double>(total_) : 0.0; }

 private:
  const Polytope* hull_;
  double dist_;
  std::int64_t first_ = 1;
  std::int64_t inside_ = 0, total_ = 0;
  bool near_ = false;
  bool fresh_ = false;
};

/// Fraction of points within `dist` of the polytope.
double fractionNearHull(const Polytope& hull, const std::vector<Vec>& spins, double dist);

struct HittingStart {
  Vec x;
  Vec s;
};

struct HittingResult {
  /// Per start: fraction of trials with |X_T - z| < r and |S_T| < r.
  std::vector<double> frequencies;
  /// Per start: fraction of trials in which |S| < r at some step up to T.
  std::vector<double> spinEntryFrequencies;
};

/// Monte Carlo estimate of reaching B(z, r) x B(0, r) at time T. Trial k of start i
/// uses seed + i * trials + k.
HittingResult hittingEstimate(const Domain& d, const FieldSet& f, const Vec& z, double r, double T, double dt,
                              const std::vector<HittingStart>& starts, std::size_t trials, std::uint64_t seed);

/// Runs task(i) for i in [0, count) on up to `workers` threads and returns the results
/// in index order, so the outcome does not depend on scheduling. The first exception
/// (lowest index) is rethrown after all workers stop.
template <class Result>
std::vector<Result> runIndexed(std::size_t count, std::size_t workers, const std::function<Result(std::size_t)>& task) {
  std::vector<Result> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace sbm
