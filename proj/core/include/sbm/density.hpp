#pragma once

#include <string>
#include <vector>

#include "sbm/histogram.hpp"

namespace sbm {

/// Closed-form stationary density of (y, s) for the one-dimensional spin on the
/// wristband [-1, 1] with g = alpha on the top wall and g = -beta on the bottom wall:
/// rho(y, s) proportional to a(s) y + b(s) on (-beta, alpha).
class WristbandDensity {
 public:
  /// `bScale` multiplies b(s); anything but 1 gives a deliberately wrong density.
  WristbandDensity(double alphaTop, double betaBottom, double bScale = 1.0);

  double alphaTop() const { return alpha_; }
  double betaBottom() const { return beta_; }
  double normalizer() const { return normalizer_; }

  double a(double s) const;
  double b(double s) const;
  /// a(s) y + b(s); 0 outside (-beta, alpha), +infinity at the two end points.
  double unnormalized(double y, double s) const;
  double evaluate(double y, double s) const { return unnormalized(y, s) / normalizer_; }

  /// Exact probability of [y0, y1] x [s0, s1] (clipped to the support).
  double cellMass(double y0, double y1, double s0, double s1) const;
  /// Cell masses on the histogram grid; axis 0 is y, axis 1 is s.
  std::vector<double> cellMasses(const OccupancyHistogram& h) const;

 private:
  double primitiveA(double s) const;
  double primitiveB(double s) const;

  double alpha_, beta_, bScale_;
  double normalizer_;
};

struct DensityComparison {
  double l1 = 0.0;
  /// |estimated - analytic| per cell, including the excluded corner cells.
  std::vector<double> perCell;
  std::vector<std::size_t> cornerCells;
  double cornerL1 = 0.0;
};

/// Cells whose closure contains the singular corners (y, s) = (1, alpha) or (-1, -beta).
std::vector<std::size_t> singularCornerCells(const OccupancyHistogram& h, const WristbandDensity& dens);

/// l1 distance between the normalised histogram over (y, s) and the analytic cell masses,
/// leaving out the singular corner cells.
DensityComparison compareToDensity(const OccupancyHistogram& h, const WristbandDensity& dens);

struct IdentityFamily {
  std::string name;
  bool passed = true;
  double worstError = 0.0;
  double worstS = 0.0;
  double worstY = 0.0;
  double tolerance = 0.0;
  std::size_t points = 0;
};

struct DensityIdentityReport {
  std::vector<IdentityFamily> families;
  bool passed() const;
};

/// Checks the boundary identities of the density on `sGrid` (inside (-beta, alpha)):
/// flux: [g(y) - s] rho(y, s) = 2 sgn(y) sqrt((alpha - s)(beta + s)) / (alpha + beta) at y = +-1;
/// vanishing: that flux goes to 0 like the square root at both ends of the spin range;
/// derivative: its s-derivative (central difference, step 1e-6) equals -sgn(y) a(s).
DensityIdentityReport verifyDensityIdentities(const WristbandDensity& dens, const std::vector<double>& sGrid,
                                              double tol = 1e-8);

}  // namespace sbm
