#include "sbm/domain.hpp"

#include <cmath>
#include <numbers>

#include "sbm/error.hpp"

namespace sbm {

namespace {

constexpr int kNewtonMaxIter = 50;
constexpr double kNewtonTol = 1e-12;

void requireFinite(const Vec& x) {
  if (!x.allFinite()) throw InvalidInput("non-finite coordinates");
}

}  // namespace

std::string toString(Region r) {
  switch (r) {
    case Region::Interior:
      return "interior";
    case Region::Boundary:
      return "boundary";
    case Region::Exterior:
      return "exterior";
  }
  return "?";
}

Domain::Domain(std::variant<Wristband, SmoothPhi> shape, double tolerance)
    : shape_(std::move(shape)), tolerance_(tolerance) {
  if (!(tolerance_ > 0.0) || !std::isfinite(tolerance_)) {
    throw InvalidInput("boundary tolerance must be positive");
  }
}

Domain Domain::wristband(double period, double halfWidth, double tolerance) {
  if (!(period > 0.0) || !(halfWidth > 0.0) || !std::isfinite(period) || !std::isfinite(halfWidth)) {
    throw InvalidInput("wristband needs period > 0 and half_width > 0");
  }
  return Domain(Wristband{period, halfWidth}, tolerance);
}

Domain Domain::smoothPhi(SmoothPhi spec, double tolerance) {
  if (!spec.phi || !spec.gradPhi) throw InvalidInput("smooth domain needs phi and grad phi");
  if (spec.dim < 1 || spec.dim > kMaxDim) throw InvalidInput("unsupported domain dimension");
  if (!(spec.reach > 0.0) || !(spec.inradius > 0.0)) {
    throw InvalidInput("smooth domain needs positive reach and inradius");
  }
  return Domain(std::move(spec), tolerance);
}

Domain Domain::unitDisk(double tolerance) {
  SmoothPhi disk;
  disk.name = "disk";
  disk.dim = 2;
  disk.phi = [](const Vec& x) { return 1.0 - x.squaredNorm(); };
  disk.gradPhi = [](const Vec& x) -> Vec { return -2.0 * x; };
  disk.reach = 1.0;
  disk.inradius = 1.0;
  disk.boundaryPoint = [](double u) {
    const double a = 2.0 * std::numbers::pi * u;
    return vec({std::cos(a), std::sin(a)});
  };
  return smoothPhi(std::move(disk), tolerance);
}

int Domain::dim() const {
  if (isWristband()) return 2;
  return std::get<SmoothPhi>(shape_).dim;
}

Domain Domain::withTolerance(double tolerance) const { return Domain(shape_, tolerance); }

const Wristband& Domain::asWristband() const {
  if (const auto* w = std::get_if<Wristband>(&shape_)) return *w;
  throw UnsupportedOperation("domain is not a wristband");
}

const SmoothPhi& Domain::asSmoothPhi() const {
  if (const auto* s = std::get_if<SmoothPhi>(&shape_)) return *s;
  throw UnsupportedOperation("domain is not a level-set domain");
}

std::string Domain::name() const {
  if (isWristband()) return "wristband";
  return std::get<SmoothPhi>(shape_).name;
}

void Domain::requireDim(const Vec& x) const {
  if (x.size() != dim()) throw InvalidInput("point has wrong dimension");
  requireFinite(x);
}

Region Domain::classify(const Vec& x) const {
  requireDim(x);
  if (const auto* w = std::get_if<Wristband>(&shape_)) {
    const double gap = w->halfWidth - std::abs(x[1]);
    if (gap > tolerance_) return Region::Interior;
    if (gap >= -tolerance_) return Region::Boundary;
    return Region::Exterior;
  }
  const auto& s = std::get<SmoothPhi>(shape_);
  if (s.phi(x) >= 0.0) {
    return boundaryDistance(x) > tolerance_ ? Region::Interior : Region::Boundary;
  }
  return projectPhi(s, x).pushDistance <= tolerance_ ? Region::Boundary : Region::Exterior;
}

double Domain::boundaryDistance(const Vec& x) const {
  requireDim(x);
  if (const auto* w = std::get_if<Wristband>(&shape_)) {
    return std::abs(w->halfWidth - std::abs(x[1]));
  }
  const auto& s = std::get<SmoothPhi>(shape_);
  const Vec grad = s.gradPhi(x);
  // Critical point of phi: the deepest point.
  if (grad.norm() < 1e-12) return s.inradius;
  return projectPhi(s, x).pushDistance;
}

Vec Domain::inwardNormal(const Vec& x) const {
  if (classify(x) != Region::Boundary) {
    throw DomainError("inward normal requested away from the boundary");
  }
  if (isWristband()) return vec({0.0, x[1] > 0.0 ? -1.0 : 1.0});
  const auto& s = std::get<SmoothPhi>(shape_);
  const Vec grad = s.gradPhi(x);
  const double norm = grad.norm();
  if (norm < 1.0 - 1e-12) throw DomainError("|grad phi| < 1 at boundary point");
  return grad / norm;
}

Projection Domain::projectPhi(const SmoothPhi& s, const Vec& x) const {
  Vec p = x;
  double f = s.phi(p);
  for (int it = 0; it < kNewtonMaxIter && std::abs(f) > kNewtonTol; ++it) {
    const Vec grad = s.gradPhi(p);
    const double g2 = grad.squaredNorm();
    if (g2 < 1e-24) throw GeometryError("projection hit a critical point of phi");
    Vec step = -(f / g2) * grad;
    // Damping: never move more than the reach in one iteration, and backtrack on growth.
    const double len = step.norm();
    if (len > s.reach) step *= s.reach / len;
    double scale = 1.0;
    Vec trial = p + step;
    double ft = s.phi(trial);
    while (std::abs(ft) > std::abs(f) && scale > 1e-4) {
      scale *= 0.5;
      trial = p + scale * step;
      ft = s.phi(trial);
    }
    p = trial;
    f = ft;
  }
  if (std::abs(f) > 1e-9) throw GeometryError("projection onto boundary did not converge");
  // Land on the closed side of the level set.
  for (int it = 0; it < 8 && s.phi(p) < 0.0; ++it) {
    const Vec grad = s.gradPhi(p);
    p += grad * ((std::abs(s.phi(p)) + 4e-16) / grad.squaredNorm());
  }
  const double dist = (x - p).norm();
  return Projection{p, dist};
}

Projection Domain::projectToClosure(const Vec& x) const {
  requireDim(x);
  if (const auto* w = std::get_if<Wristband>(&shape_)) {
    Projection out{x, 0.0};
    if (x[1] > w->halfWidth) {
      out.pushDistance = x[1] - w->halfWidth;
      out.point[1] = w->halfWidth;
    } else if (x[1] < -w->halfWidth) {
      out.pushDistance = -w->halfWidth - x[1];
      out.point[1] = -w->halfWidth;
    }
    return out;
  }
  const auto& s = std::get<SmoothPhi>(shape_);
  if (s.phi(x) >= 0.0) return Projection{x, 0.0};
  Projection out = projectPhi(s, x);
  if (out.pushDistance > s.reach) throw GeometryError("point beyond projection reach");
  return out;
}

Vec Domain::wrap(const Vec& x) const {
  const auto* w = std::get_if<Wristband>(&shape_);
  if (w == nullptr) throw UnsupportedOperation("wrap is only defined on the wristband");
  Vec out = x;
  double r = std::fmod(x[0], w->period);
  if (r < 0.0) r += w->period;
  if (r >= w->period) r = 0.0;
  out[0] = r;
  return out;
}

Vec Domain::displacement(const Vec& a, const Vec& b) const {
  Vec d = b - a;
  if (const auto* w = std::get_if<Wristband>(&shape_)) d[0] = std::remainder(d[0], w->period);
  return d;
}

double Domain::distance(const Vec& a, const Vec& b) const { return displacement(a, b).norm(); }

double Domain::inradius() const {
  if (const auto* w = std::get_if<Wristband>(&shape_)) return w->halfWidth;
  return std::get<SmoothPhi>(shape_).inradius;
}

std::vector<Vec> Domain::sampleBoundary(std::size_t count) const {
  std::vector<Vec> out;
  out.reserve(count);
  if (const auto* w = std::get_if<Wristband>(&shape_)) {
    const std::size_t top = (count + 1) / 2;
    const std::size_t bottom = count - top;
    for (std::size_t k = 0; k < top; ++k) {
      out.push_back(vec({w->period * static_cast<double>(k) / static_cast<double>(top), w->halfWidth}));
    }
    for (std::size_t k = 0; k < bottom; ++k) {
      out.push_back(
          vec({w->period * static_cast<double>(k) / static_cast<double>(bottom), -w->halfWidth}));
    }
    return out;
  }
  const auto& s = std::get<SmoothPhi>(shape_);
  if (!s.boundaryPoint) throw UnsupportedOperation("domain has no boundary parametrisation");
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(s.boundaryPoint(static_cast<double>(k) / static_cast<double>(count)));
  }
  return out;
}

}  // namespace sbm
