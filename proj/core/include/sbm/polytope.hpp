#pragma once

#include <array>
#include <vector>

#include "sbm/linalg.hpp"

namespace sbm {

/// Convex hull of a finite point set in R^p, p <= 3. Lower-dimensional hulls
/// (all points collinear, coplanar, ...) are kept in their affine hull and
/// flagged as degenerate rather than rejected.
class Polytope {
 public:
  Polytope() = default;
  static Polytope hullOf(const std::vector<Vec>& points, double tol = 1e-10);

  int ambientDim() const { return ambientDim_; }
  int affineDim() const { return affineDim_; }
  bool degenerate() const { return affineDim_ < ambientDim_; }
  bool empty() const { return vertices_.empty(); }

  /// Hull vertices in ambient coordinates (counter-clockwise when affineDim == 2).
  const std::vector<Vec>& vertices() const { return vertices_; }

  /// Euclidean distance from q to the hull (0 inside).
  double distance(const Vec& q) const;
  bool contains(const Vec& q, double tol = 1e-9) const { return distance(q) <= tol; }

 private:
  using Local = Eigen::Vector3d;

  Local toLocal(const Vec& q) const;
  double localDistance(const Local& q) const;

  int ambientDim_ = 0;
  int affineDim_ = 0;
  Vec origin_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, 3> basis_;
  std::vector<Vec> vertices_;
  std::vector<Local> local_;                 // hull vertices in affine coordinates
  std::vector<std::array<int, 3>> faces_;    // affineDim == 3, outward orientation
  double tol_ = 1e-10;
};

}  // namespace sbm
