#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbm/domain.hpp"
#include "sbm/linalg.hpp"
#include "sbm/polytope.hpp"

namespace sbm {

using BoundaryVectorField = std::function<Vec(const Vec& x)>;
using BoundaryScalarField = std::function<double(const Vec& x)>;
using TangentialField = std::function<Vec(const Vec& x, const Vec& s)>;
using DiffusionField = std::function<Mat(const Vec& x)>;

/// Coefficients of the reflected system: spin forcing g, spin damping alpha,
/// tangential reflection tau and diffusion sigma. Empty `tau` means zero,
/// empty `sigma` means the identity.
struct FieldSet {
  int spinDim = 1;
  BoundaryVectorField g;
  BoundaryScalarField alpha;
  TangentialField tau;
  DiffusionField sigma;
  /// sup over the boundary of |g|.
  double gSupNorm = 0.0;
  /// inf over the boundary of alpha; must be positive.
  double alphaInf = 1.0;
  std::string description;

  Vec tauAt(const Vec& x, const Vec& s) const;
  /// Bound on |S| reached from S = 0: gSupNorm / alphaInf.
  double spinRadius() const { return gSupNorm / alphaInf; }
};

/// Builds a FieldSet and fills the cached sup/inf by sampling the boundary.
FieldSet makeFieldSet(int spinDim, BoundaryVectorField g, BoundaryScalarField alpha,
                      TangentialField tau, DiffusionField sigma, const Domain& domain,
                      std::size_t samples = 4096, std::string description = {});

/// Checks the FieldSet invariants at `samples` boundary points: tau . n = 0,
/// alpha >= alphaInf > 0, |g| <= gSupNorm, sigma symmetric positive definite.
/// Throws ValidationError naming the first violation.
void validateFieldSet(const FieldSet& f, const Domain& domain, std::size_t samples = 256);

// ---- built-in vocabulary ---------------------------------------------------

/// Component-wise trigonometric profile of the boundary coordinate u
/// (the periodic coordinate on the wristband, the polar angle on the disk):
/// component i is c_i + a_i cos(u) + b_i sin(u).
struct FourierProfile {
  std::vector<std::array<double, 3>> components;  // {c, a, b}

  static FourierProfile constant(const Vec& v);
  int dim() const { return static_cast<int>(components.size()); }
  Vec operator()(double u) const;
  /// Exact sup over u of the Euclidean norm, up to 1e-9 (dense sampling + refinement).
  double supNorm() const;
};

/// Tangential reflection strength; the direction is the positively oriented
/// boundary tangent (x-hat on the wristband, counter-clockwise on the disk).
struct TauProfile {
  enum class Kind { Zero, Constant, OneMinusSpinSquared };
  Kind kind = Kind::Zero;
  double scale = 0.0;

  static TauProfile zero() { return {}; }
  static TauProfile constant(double lambda) { return {Kind::Constant, lambda}; }
  static TauProfile oneMinusSpinSquared(double scale = 1.0) { return {Kind::OneMinusSpinSquared, scale}; }
  double strength(const Vec& s) const;
};

/// Boundary coordinate of a boundary point: x on the wristband, angle on a 2-D level set.
double boundaryCoordinate(const Domain& d, const Vec& x);
/// Unit tangent along which tau acts.
Vec boundaryTangent(const Domain& d, const Vec& x);

/// Wristband fields with separate profiles on the top (y = +w) and bottom (y = -w) walls.
FieldSet wristbandFields(const Domain& d, const FourierProfile& gTop, const FourierProfile& gBottom,
                         double damping, const TauProfile& tauTop, const TauProfile& tauBottom,
                         std::string description = {});

/// Fields on a 2-D level-set domain given as profiles of the polar angle.
FieldSet angularFields(const Domain& d, const FourierProfile& g, double damping, const TauProfile& tau,
                       std::string description = {});

namespace presets {

/// One-dimensional spin on the wristband: g = alphaTop on the top wall,
/// -betaBottom on the bottom wall, unit damping, tau = lambda x-hat on the top wall.
FieldSet wristbandOneDimSpin(const Domain& d, double alphaTop, double betaBottom, double lambda);

/// g = (1/2, 0) on top, (1/2)(cos x, sin x) on the bottom, tau = 1 - |s|^2.
FieldSet pointConcentration(const Domain& d);

/// g = (0, sin x) on top, (cos x, 0) on the bottom, tau = 1 - |s|^2.
FieldSet axesConcentration(const Domain& d);

}  // namespace presets

// ---- oblique reflection ----------------------------------------------------

/// Reflection direction n(x) + tau(x, s) at a boundary point.
Vec gamma(const FieldSet& f, const Domain& d, const Vec& x, const Vec& s);

// ---- positive spanning -----------------------------------------------------

struct A1Result {
  bool holds = false;
  /// Non-negative coefficients representing +e_i and -e_i (2p rows) when they exist.
  std::vector<std::vector<double>> unitCoefficients;
  /// Strictly positive weights with sum_j w_j v_j = 0 (only when holds).
  std::vector<double> interiorWeights;
  /// A unit direction no non-negative combination reaches (only when !holds).
  std::optional<Vec> unreachableDirection;
  std::string message;
};

/// Do the p+1 vectors positively span R^p?
A1Result checkA1(const std::vector<Vec>& gVectors);

/// Is y = sum eta_j v_j with eta >= 0 and sum eta < eps (strictness relaxed to eps(1 - 1e-9))?
bool coneMembership(const std::vector<Vec>& gVectors, const Vec& y, double eps);

struct AnchorSet {
  std::vector<Vec> points;
  std::vector<Vec> gVectors;
  std::vector<double> alphaValues;
};

/// Evaluates g and alpha at the given boundary points; throws CertificateError
/// when the g-values do not satisfy A1 and DomainError for off-boundary points.
AnchorSet makeAnchorSet(const FieldSet& f, const Domain& d, std::vector<Vec> points);

/// Searches `samples` evenly spread boundary points for p+1 anchors satisfying A1,
/// preferring the set whose null-space weights are most balanced.
std::optional<AnchorSet> findAnchors(const FieldSet& f, const Domain& d, std::size_t samples = 48);

// ---- hull of g / alpha -----------------------------------------------------

/// Convex hull of { g(x) / alpha(x) } over `boundarySamples` evenly spaced boundary points.
Polytope hullHgAlpha(const FieldSet& f, const Domain& d, std::size_t boundarySamples);

}  // namespace sbm
