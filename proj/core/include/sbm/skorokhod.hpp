#pragma once

#include <iosfwd>
#include <variant>
#include <vector>

#include "sbm/domain.hpp"
#include "sbm/fields.hpp"
#include "sbm/linalg.hpp"

namespace sbm {

/// Interior transfer: cubic Hermite curve from `from` to `to` (unwrapped coordinates).
struct FreeCurve {
  Vec from;
  Vec to;
  Vec tangentFrom;
  Vec tangentTo;

  Vec at(double u) const;
};

/// The path sits at a boundary point while local time grows at `rate`.
struct BoundaryHold {
  Vec point;
  double rate = 0.0;
};

struct DriverSegment {
  double start = 0.0;
  double end = 0.0;
  std::variant<FreeCurve, BoundaryHold> data;

  bool isHold() const { return std::holds_alternative<BoundaryHold>(data); }
  double duration() const { return end - start; }
};

/// Bounded-variation driver, described by the solution it produces: alternating interior
/// curves and boundary holds partitioning [0, totalTime].
struct BVDriver {
  std::vector<DriverSegment> segments;
  double totalTime = 0.0;
};

struct PathPoint {
  double t = 0.0;
  Vec x;
  Vec s;
  double l = 0.0;
};

/// Solution (x, s, l) of the deterministic reflected system for a driver.
class DeterministicSolution {
 public:
  DeterministicSolution(BVDriver driver, const Domain& d, std::vector<Vec> holdG, std::vector<double> holdAlpha,
                        Vec x0, Vec s0);

  PathPoint at(double t) const;
  PathPoint final() const { return at(driver_.totalTime); }
  /// `count` >= 2 equally spaced samples including both end points.
  std::vector<PathPoint> sample(std::size_t count) const;
  const BVDriver& driver() const { return driver_; }

  /// Spin during hold segment `seg` using the closed product form over all earlier holds.
  Vec holdSpin(std::size_t seg, double t) const;

 private:
  BVDriver driver_;
  const Domain* domain_;
  std::vector<Vec> g_;          // per segment, empty for free curves
  std::vector<double> alpha_;   // per segment
  std::vector<double> factor_;  // y_m(b_m) = exp(alpha * rate * duration), 1 for free curves
  std::vector<double> lStart_;  // l at segment start
  Vec x0_;
  Vec s0_;
};

/// Validates the driver against the geometry and solves it in closed form.
/// Throws ValidationError naming the offending segment.
DeterministicSolution solveDeterministic(const BVDriver& drv, const Domain& d, const FieldSet& f, const Vec& x0,
                                         const Vec& s0);

/// Minimal-sum non-negative lambda with sum_j lambda_j g_j = target; CertificateError when infeasible.
std::vector<double> solveLambda(const Vec& target, const std::vector<Vec>& gVectors);

/// Interior Hermite curve between two closure points (boundary end points leave along the normal).
/// Sampled at 1000 interior parameters, all of which must be strictly interior.
FreeCurve makeFreeCurve(const Domain& d, const Vec& from, const Vec& to);

/// Driver steering (x0, s0) to (z, 0) at time T through the anchors, on a uniform partition
/// free, hold_1, free, hold_2, ..., hold_{p+1}, free.
BVDriver constructSPbvDriver(const Domain& d, const FieldSet& f, const AnchorSet& anchors, const Vec& x0,
                             const Vec& s0, const Vec& z, double T);

/// Segment-list text block, 17 significant digits.
void writeDriver(std::ostream& out, const BVDriver& drv);
BVDriver readDriver(std::istream& in);

}  // namespace sbm
