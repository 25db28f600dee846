#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "sbm/linalg.hpp"

namespace sbm {

enum class Region { Interior, Boundary, Exterior };

std::string toString(Region r);

/// Flat cylinder [0, period) x [-halfWidth, halfWidth]; the first coordinate is periodic.
struct Wristband {
  double period = 0.0;
  double halfWidth = 0.0;
};

/// Domain {phi > 0} of a C^2 level-set function with |grad phi| >= 1 on the boundary.
struct SmoothPhi {
  std::function<double(const Vec&)> phi;
  std::function<Vec(const Vec&)> gradPhi;
  int dim = 2;
  /// Points farther than this outside the closure cannot be projected.
  double reach = 1.0;
  /// Radius of the largest inscribed ball.
  double inradius = 1.0;
  /// Parametrisation of the boundary used for sampling: u in [0,1) -> point on {phi = 0}.
  std::function<Vec(double)> boundaryPoint;
  std::string name = "phi";
};

struct Projection {
  Vec point;
  double pushDistance = 0.0;
};

/// State-space geometry. Immutable after construction.
class Domain {
 public:
  static constexpr double kDefaultTolerance = 1e-12;

  static Domain wristband(double period, double halfWidth, double tolerance = kDefaultTolerance);
  static Domain smoothPhi(SmoothPhi spec, double tolerance = kDefaultTolerance);
  /// The unit disk, phi(x) = 1 - |x|^2.
  static Domain unitDisk(double tolerance = kDefaultTolerance);

  int dim() const;
  double tolerance() const { return tolerance_; }
  Domain withTolerance(double tolerance) const;

  bool isWristband() const { return std::holds_alternative<Wristband>(shape_); }
  const Wristband& asWristband() const;
  const SmoothPhi& asSmoothPhi() const;
  std::string name() const;

  Region classify(const Vec& x) const;

  /// Distance to the boundary for points in the closure, measured inward.
  double boundaryDistance(const Vec& x) const;

  /// Unit interior normal; throws DomainError unless classify(x) == Boundary.
  Vec inwardNormal(const Vec& x) const;

  /// Nearest point of the closure. Identity on the closure.
  Projection projectToClosure(const Vec& x) const;

  /// Maps the periodic coordinate into [0, period). Wristband only.
  Vec wrap(const Vec& x) const;

  /// Euclidean distance, with the minimal periodic offset on the wristband.
  double distance(const Vec& a, const Vec& b) const;
  /// b - a using the minimal periodic representative.
  Vec displacement(const Vec& a, const Vec& b) const;

  double inradius() const;

  /// `count` boundary points spread evenly along the boundary.
  std::vector<Vec> sampleBoundary(std::size_t count) const;

  /// True when x lies in the closed domain without any tolerance.
  bool inClosure(const Vec& x) const {
    if (const auto* w = std::get_if<Wristband>(&shape_)) {
      return x[1] <= w->halfWidth && x[1] >= -w->halfWidth;
    }
    return std::get<SmoothPhi>(shape_).phi(x) >= 0.0;
  }

 private:
  Domain(std::variant<Wristband, SmoothPhi> shape, double tolerance);

  void requireDim(const Vec& x) const;
  Projection projectPhi(const SmoothPhi& s, const Vec& x) const;

  std::variant<Wristband, SmoothPhi> shape_;
  double tolerance_;
};

}  // namespace sbm
