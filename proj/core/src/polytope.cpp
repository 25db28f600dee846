#include "sbm/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "sbm/error.hpp"

namespace sbm {

namespace {

using Local = Eigen::Vector3d;

double cross2(const Local& o, const Local& a, const Local& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew's monotone chain on the first two coordinates; returns CCW vertex order.
std::vector<Local> monotoneChain(std::vector<Local> pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](const Local& a, const Local& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  std::vector<Local> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p) <= tol) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i]) <= tol) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double segmentDistance(const Local& q, const Local& a, const Local& b) {
  const Local ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (q - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (q - (a + t * ab)).norm();
}

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
Local closestOnTriangle(const Local& p, const Local& a, const Local& b, const Local& c) {
  const Local ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Local bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Local cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

struct Face {
  std::array<int, 3> v;
  Local normal;
  double offset;
};

Face makeFace(const std::vector<Local>& pts, int a, int b, int c) {
  Face f{{a, b, c}, (pts[b] - pts[a]).cross(pts[c] - pts[a]), 0.0};
  const double n = f.normal.norm();
  if (n > 0.0) f.normal /= n;
  f.offset = f.normal.dot(pts[a]);
  return f;
}

// Incremental (beneath-beyond) hull of a full-dimensional 3-D point set.
std::vector<Face> hull3(const std::vector<Local>& pts, double tol) {
  const int n = static_cast<int>(pts.size());
  // Initial tetrahedron.
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  double best = 0.0;
  for (int i = 1; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > best) best = d, i1 = i;
  }
  best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = (pts[i1] - pts[i0]).cross(pts[i] - pts[i0]).norm();
    if (d > best) best = d, i2 = i;
  }
  best = 0.0;
  const Local nrm = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]);
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(nrm.dot(pts[i] - pts[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (i1 < 0 || i2 < 0 || i3 < 0) throw GeometryError("3-D hull of a degenerate point set");

  std::vector<Face> faces;
  const Local centroid = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  auto addOriented = [&](int a, int b, int c) {
    Face f = makeFace(pts, a, b, c);
    if (f.normal.dot(centroid) - f.offset > 0.0) f = makeFace(pts, a, c, b);
    faces.push_back(f);
  };
  addOriented(i0, i1, i2);
  addOriented(i0, i1, i3);
  addOriented(i0, i2, i3);
  addOriented(i1, i2, i3);

  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<bool> visible(faces.size(), false);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].normal.dot(pts[p]) - faces[f].offset > tol) visible[f] = any = true;
    }
    if (!any) continue;
    std::set<std::pair<int, int>> edges;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) edges.insert({v[e], v[(e + 1) % 3]});
    }
    std::vector<Face> kept;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) kept.push_back(faces[f]);
    }
    for (const auto& [a, b] : edges) {
      if (!edges.contains({b, a})) kept.push_back(makeFace(pts, a, b, p));
    }
    faces = std::move(kept);
  }
  return faces;
}

}  // namespace

Polytope Polytope::hullOf(const std::vector<Vec>& points, double tol) {
  if (points.empty()) throw InvalidInput("hull of an empty point set");
  Polytope out;
  out.ambientDim_ = static_cast<int>(points.front().size());
  if (out.ambientDim_ < 1 || out.ambientDim_ > 3) throw InvalidInput("hull supports dimensions 1..3");
  out.tol_ = tol;

  Vec centroid = Vec::Zero(out.ambientDim_);
  for (const auto& p : points) {
    if (p.size() != out.ambientDim_) throw InvalidInput("hull points differ in dimension");
    centroid += p;
  }
  centroid /= static_cast<double>(points.size());
  out.origin_ = centroid;

  Eigen::MatrixXd centered(out.ambientDim_, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) centered.col(static_cast<Eigen::Index>(i)) = points[i] - centroid;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double scale = std::max(1.0, centered.cwiseAbs().maxCoeff()) * std::sqrt(static_cast<double>(points.size()));
  int k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) k += sv[i] > 1e-9 * scale ? 1 : 0;
  out.affineDim_ = k;
  out.basis_ = svd.matrixU().leftCols(k);

  std::vector<Local> local;
  local.reserve(points.size());
  for (const auto& p : points) local.push_back(out.toLocal(p));

  if (k == 0) {
    out.local_ = {Local::Zero()};
  } else if (k == 1) {
    auto [lo, hi] = std::minmax_element(local.begin(), local.end(),
                                        [](const Local& a, const Local& b) { return a.x() < b.x(); });
    out.local_ = {*lo, *hi};
  } else if (k == 2) {
    out.local_ = monotoneChain(local, tol);
  } else {
    const auto faces = hull3(local, tol);
    std::map<int, int> remap;
    for (const auto& f : faces) {
      std::array<int, 3> idx{};
      for (int e = 0; e < 3; ++e) {
        auto [it, inserted] = remap.try_emplace(f.v[e], static_cast<int>(out.local_.size()));
        if (inserted) out.local_.push_back(local[f.v[e]]);
        idx[e] = it->second;
      }
      out.faces_.push_back(idx);
    }
  }
  for (const auto& l : out.local_) {
    Vec v = out.origin_;
    for (int c = 0; c < k; ++c) v += l[c] * out.basis_.col(c);
    out.vertices_.push_back(v);
  }
  return out;
}

Polytope::Local Polytope::toLocal(const Vec& q) const {
  Local out = Local::Zero();
  const Vec d = q - origin_;
  for (int c = 0; c < affineDim_; ++c) out[c] = basis_.col(c).dot(d);
  return out;
}

double Polytope::localDistance(const Local& q) const {
  switch (affineDim_) {
    case 0:
      return q.norm();
    case 1:
      return segmentDistance(q, local_[0], local_[1]);
    case 2: {
      const std::size_t m = local_.size();
      bool inside = true;
      for (std::size_t i = 0; i < m && inside; ++i) {
        if (cross2(local_[i], local_[(i + 1) % m], q) < 0.0) inside = false;
      }
      if (inside) return 0.0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) best = std::min(best, segmentDistance(q, local_[i], local_[(i + 1) % m]));
      return best;
    }
    default: {
      bool inside = true;
      for (const auto& f : faces_) {
        const Local n = (local_[f[1]] - local_[f[0]]).cross(local_[f[2]] - local_[f[0]]);
        if (n.dot(q - local_[f[0]]) > 0.0) {
          inside = false;
          break;
        }
      }
      if (inside) return 0.0;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& f : faces_) {
        best = std::min(best, (q - closestOnTriangle(q, local_[f[0]], local_[f[1]], local_[f[2]])).norm());
      }
      return best;
    }
  }
}

double Polytope::distance(const Vec& q) const {
  if (empty()) throw InvalidInput("distance to an empty hull");
  if (q.size() != ambientDim_) throw InvalidInput("query point has wrong dimension");
  if (!degenerate()) return localDistance(toLocal(q));
  const Vec d = q - origin_;
  Vec inPlane = Vec::Zero(ambientDim_);
  for (int c = 0; c < affineDim_; ++c) inPlane += basis_.col(c).dot(d) * basis_.col(c);
  const double off = (d - inPlane).norm();
  const double in = localDistance(toLocal(q));
  return std::sqrt(off * off + in * in);
}

}  // namespace sbm
