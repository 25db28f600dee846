#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbm/integrator.hpp"
#include "sbm/linalg.hpp"

namespace sbm {

/// Selects one coordinate of the (position, spin) state: "x1".."xn" or "s1".."sp".
struct Coordinate {
  enum class Kind { Position, Spin };
  Kind kind = Kind::Position;
  int index = 0;  // zero-based

  static Coordinate parse(const std::string& name);
  std::string name() const;
  double of(const Vec& x, const Vec& s) const { return kind == Kind::Position ? x[index] : s[index]; }
  bool operator==(const Coordinate& o) const { return kind == o.kind && index == o.index; }
};

/// Uniform bins on [lo, hi]; the upper edge belongs to the last bin.
struct Axis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t bins = 1;

  double width() const { return (hi - lo) / static_cast<double>(bins); }
  double edge(std::size_t i) const { return lo + width() * static_cast<double>(i); }
  double mid(std::size_t i) const { return lo + width() * (static_cast<double>(i) + 0.5); }
  std::optional<std::size_t> index(double v) const;
  bool operator==(const Axis& o) const { return name == o.name && lo == o.lo && hi == o.hi && bins == o.bins; }
};

/// Time-weighted occupation counts on a rectangular grid (row-major, last axis fastest).
class OccupancyHistogram {
 public:
  OccupancyHistogram(std::vector<Axis> axes, std::vector<Coordinate> coords);
  /// Axes named by coordinate, e.g. {"x2", -1, 1, 20}.
  explicit OccupancyHistogram(std::vector<Axis> axes);

  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<Coordinate>& coordinates() const { return coords_; }
  std::size_t cellCount() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t flat) const { return weights_[flat]; }
  std::size_t flatIndex(const std::vector<std::size_t>& idx) const;
  std::vector<std::size_t> multiIndex(std::size_t flat) const;

  /// Sum of the in-range cell weights.
  double totalWeight() const { return total_; }
  double overflowWeight() const { return overflow_; }
  std::size_t overflowCount() const { return overflowCount_; }
  bool empty() const { return total_ == 0.0 && overflow_ == 0.0; }

  void add(const Vec& x, const Vec& s, double weight);
  /// Adds every record with t >= burnIn, each carrying dt * recordStride.
  void accumulate(const Trajectory& traj, double burnIn);
  /// Cell-wise sum; throws InvalidInput on mismatched axes.
  void merge(const OccupancyHistogram& other);

  /// Cell weights divided by totalWeight; all zero for an empty histogram.
  std::vector<double> masses() const;

  /// Header `axis1_mid,axis2_mid,...,weight,prob`.
  void writeCsv(std::ostream& out) const;

 private:
  std::vector<Axis> axes_;
  std::vector<Coordinate> coords_;
  std::vector<double> weights_;
  double total_ = 0.0;
  double overflow_ = 0.0;
  std::size_t overflowCount_ = 0;
};

OccupancyHistogram merge(const OccupancyHistogram& a, const OccupancyHistogram& b);

/// Feeds a running chain straight into a histogram, using the same burn-in rule as
/// TrajectoryRecorder with stride 1.
class HistogramAccumulator : public StepObserver {
 public:
  explicit HistogramAccumulator(OccupancyHistogram& hist) : hist_(&hist) {}
  void onStart(const SimConfig& cfg, const StepRecord& initial) override;
  void onStep(const StepRecord& rec) override;

 private:
  OccupancyHistogram* hist_;
  std::int64_t first_ = 1;
  double weight_ = 0.0;
};

/// Sum of |p1 - p2| over cells not listed in `excluded`, with p the normalised masses.
double l1Distance(const OccupancyHistogram& a, const OccupancyHistogram& b,
                  const std::vector<std::size_t>& excluded = {});

}  // namespace sbm
