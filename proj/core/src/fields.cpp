#include "sbm/fields.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sbm/error.hpp"
#include "sbm/small_lp.hpp"

namespace sbm {

Vec FieldSet::tauAt(const Vec& x, const Vec& s) const {
  if (!tau) return Vec::Zero(x.size());
  return tau(x, s);
}

FieldSet makeFieldSet(int spinDim, BoundaryVectorField g, BoundaryScalarField alpha, TangentialField tau,
                      DiffusionField sigma, const Domain& domain, std::size_t samples,
                      std::string description) {
  if (spinDim < 1 || spinDim > kMaxDim) throw InvalidInput("spin dimension out of range");
  if (!g || !alpha) throw InvalidInput("g and alpha are required");
  FieldSet f;
  f.spinDim = spinDim;
  f.g = std::move(g);
  f.alpha = std::move(alpha);
  f.tau = std::move(tau);
  f.sigma = std::move(sigma);
  f.description = std::move(description);
  f.gSupNorm = 0.0;
  f.alphaInf = std::numeric_limits<double>::infinity();
  for (const auto& x : domain.sampleBoundary(samples)) {
    const Vec gx = f.g(x);
    if (gx.size() != spinDim) throw InvalidInput("g has the wrong dimension");
    f.gSupNorm = std::max(f.gSupNorm, gx.norm());
    f.alphaInf = std::min(f.alphaInf, f.alpha(x));
  }
  if (!(f.alphaInf > 0.0)) throw InvalidInput("alpha must be positive on the boundary");
  return f;
}

void validateFieldSet(const FieldSet& f, const Domain& domain, std::size_t samples) {
  const auto points = domain.sampleBoundary(samples);
  std::vector<Vec> spins{Vec::Zero(f.spinDim)};
  for (int i = 0; i < f.spinDim; ++i) {
    Vec e = Vec::Zero(f.spinDim);
    e[i] = 0.75;
    spins.push_back(e);
  }
  for (const auto& x : points) {
    std::ostringstream where;
    where << "at boundary point (" << x.transpose() << ")";
    const double a = f.alpha(x);
    if (!(a > 0.0) || a < f.alphaInf * (1.0 - 1e-12)) {
      throw ValidationError("alpha below its cached infimum " + where.str());
    }
    const Vec gx = f.g(x);
    if (gx.size() != f.spinDim) throw ValidationError("g has the wrong dimension " + where.str());
    if (gx.norm() > f.gSupNorm * (1.0 + 1e-9) + 1e-15) {
      throw ValidationError("|g| exceeds its cached sup norm " + where.str());
    }
    const Vec n = domain.inwardNormal(x);
    for (const auto& s : spins) {
      if (std::abs(f.tauAt(x, s).dot(n)) > 1e-12) {
        throw ValidationError("tau is not tangential " + where.str());
      }
    }
    if (f.sigma) {
      const Mat sig = f.sigma(x);
      if (sig.rows() != domain.dim() || sig.cols() != domain.dim() ||
          (sig - sig.transpose()).cwiseAbs().maxCoeff() > 1e-12 || sig.llt().info() != Eigen::Success) {
        throw ValidationError("sigma is not symmetric positive definite " + where.str());
      }
    }
  }
}

// ---- vocabulary --------------------------------------------------------------

FourierProfile FourierProfile::constant(const Vec& v) {
  FourierProfile p;
  for (Eigen::Index i = 0; i < v.size(); ++i) p.components.push_back({v[i], 0.0, 0.0});
  return p;
}

Vec FourierProfile::operator()(double u) const {
  const double c = std::cos(u), s = std::sin(u);
  Vec out(dim());
  for (int i = 0; i < dim(); ++i) {
    const auto& [k, a, b] = components[static_cast<std::size_t>(i)];
    out[i] = k + a * c + b * s;
  }
  return out;
}

double FourierProfile::supNorm() const {
  constexpr int kGrid = 4096;
  const double h = 2.0 * std::numbers::pi / kGrid;
  int best = 0;
  double bestVal = -1.0;
  for (int k = 0; k < kGrid; ++k) {
    const double v = (*this)(k * h).norm();
    if (v > bestVal) bestVal = v, best = k;
  }
  // Golden-section refinement around the best grid point.
  double lo = (best - 1) * h, hi = (best + 1) * h;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
    if ((*this)(m1).norm() < (*this)(m2).norm()) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return std::max(bestVal, (*this)(0.5 * (lo + hi)).norm());
}

double TauProfile::strength(const Vec& s) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return scale;
    case Kind::OneMinusSpinSquared:
      return scale * (1.0 - s.squaredNorm());
  }
  return 0.0;
}

double boundaryCoordinate(const Domain& d, const Vec& x) {
  if (d.isWristband()) return x[0];
  if (d.dim() != 2) throw UnsupportedOperation("angular coordinate needs a planar domain");
  return std::atan2(x[1], x[0]);
}

Vec boundaryTangent(const Domain& d, const Vec& x) {
  if (d.isWristband()) return vec({1.0, 0.0});
  if (d.dim() != 2) throw UnsupportedOperation("tangent needs a planar domain");
  const Vec n = d.inwardNormal(x);
  // Counter-clockwise for a domain on the left of its boundary.
  return vec({n[1], -n[0]});
}

FieldSet wristbandFields(const Domain& d, const FourierProfile& gTop, const FourierProfile& gBottom,
                         double damping, const TauProfile& tauTop, const TauProfile& tauBottom,
                         std::string description) {
  if (!d.isWristband()) throw InvalidInput("wristband fields need a wristband domain");
  if (gTop.dim() != gBottom.dim() || gTop.dim() < 1 || gTop.dim() > kMaxDim) {
    throw InvalidInput("g_top and g_bottom must have the same spin dimension");
  }
  if (!(damping > 0.0)) throw InvalidInput("damping must be positive");
  FieldSet f;
  f.spinDim = gTop.dim();
  f.g = [gTop, gBottom](const Vec& x) { return x[1] > 0.0 ? gTop(x[0]) : gBottom(x[0]); };
  f.alpha = [damping](const Vec&) { return damping; };
  if (tauTop.kind != TauProfile::Kind::Zero || tauBottom.kind != TauProfile::Kind::Zero) {
    f.tau = [tauTop, tauBottom](const Vec& x, const Vec& s) {
      const double k = x[1] > 0.0 ? tauTop.strength(s) : tauBottom.strength(s);
      return vec({k, 0.0});
    };
  }
  f.gSupNorm = std::max(gTop.supNorm(), gBottom.supNorm());
  f.alphaInf = damping;
  f.description = std::move(description);
  return f;
}

FieldSet angularFields(const Domain& d, const FourierProfile& g, double damping, const TauProfile& tau,
                       std::string description) {
  if (d.isWristband() || d.dim() != 2) throw InvalidInput("angular fields need a planar level-set domain");
  if (g.dim() < 1 || g.dim() > kMaxDim) throw InvalidInput("bad spin dimension");
  if (!(damping > 0.0)) throw InvalidInput("damping must be positive");
  FieldSet f;
  f.spinDim = g.dim();
  f.g = [g](const Vec& x) { return g(std::atan2(x[1], x[0])); };
  f.alpha = [damping](const Vec&) { return damping; };
  if (tau.kind != TauProfile::Kind::Zero) {
    f.tau = [tau](const Vec& x, const Vec& s) -> Vec {
      const double r = x.norm();
      return tau.strength(s) * vec({-x[1] / r, x[0] / r});
    };
  }
  f.gSupNorm = g.supNorm();
  f.alphaInf = damping;
  f.description = std::move(description);
  return f;
}

namespace presets {

FieldSet wristbandOneDimSpin(const Domain& d, double alphaTop, double betaBottom, double lambda) {
  if (!(alphaTop > 0.0) || !(betaBottom > 0.0)) throw InvalidInput("alpha and beta must be positive");
  return wristbandFields(d, FourierProfile::constant(vec({alphaTop})),
                         FourierProfile::constant(vec({-betaBottom})), 1.0, TauProfile::constant(lambda),
                         TauProfile::zero(), "wristband-1d-spin");
}

FieldSet pointConcentration(const Domain& d) {
  FourierProfile bottom{{{0.0, 0.5, 0.0}, {0.0, 0.0, 0.5}}};
  return wristbandFields(d, FourierProfile::constant(vec({0.5, 0.0})), bottom, 1.0,
                         TauProfile::oneMinusSpinSquared(), TauProfile::oneMinusSpinSquared(),
                         "point-concentration");
}

FieldSet axesConcentration(const Domain& d) {
  FourierProfile top{{{0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}}};
  FourierProfile bottom{{{0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}}};
  return wristbandFields(d, top, bottom, 1.0, TauProfile::oneMinusSpinSquared(),
                         TauProfile::oneMinusSpinSquared(), "axes-concentration");
}

}  // namespace presets

Vec gamma(const FieldSet& f, const Domain& d, const Vec& x, const Vec& s) {
  return d.inwardNormal(x) + f.tauAt(x, s);
}

// ---- positive spanning ---------------------------------------------------------

namespace {

void requireSpanningInput(const std::vector<Vec>& v) {
  if (v.size() < 2) throw InvalidInput("need p+1 vectors");
  const auto p = static_cast<Eigen::Index>(v.size() - 1);
  if (p > kMaxDim) throw InvalidInput("spin dimension too large");
  for (const auto& x : v) {
    if (x.size() != p) throw InvalidInput("expected p+1 vectors of dimension p");
    if (!x.allFinite()) throw InvalidInput("non-finite vector");
  }
}

// Directions d with d . v_j <= 0 for every j; the best one has the largest margin.
Vec unreachableDirection(const std::vector<Vec>& v) {
  const auto p = v.front().size();
  std::vector<Vec> unit;
  for (const auto& x : v) {
    const double n = x.norm();
    if (n > 0.0) unit.push_back(x / n);
  }
  std::vector<Vec> candidates;
  Vec sum = Vec::Zero(p);
  for (const auto& u : unit) sum += u;
  if (sum.norm() > 1e-12) candidates.push_back(-sum / sum.norm());
  // Normals of hyperplanes through p-1 of the vectors (and complements of rank-deficient spans).
  const std::size_t m = unit.size();
  for (unsigned mask = 0; mask < (1U << m); ++mask) {
    if (std::popcount(mask) > static_cast<int>(p) - 1) continue;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, std::max(1, std::popcount(mask)));
    int c = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if ((mask >> j) & 1U) a.col(c++) = unit[j];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()[i] > 1e-10 ? 1 : 0;
    for (Eigen::Index col = rank; col < p; ++col) {
      const Vec n = svd.matrixU().col(col);
      candidates.push_back(n);
      candidates.push_back(-n);
    }
  }
  std::optional<Vec> best;
  double bestMargin = -std::numeric_limits<double>::infinity();
  for (const auto& d : candidates) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& u : unit) margin = std::min(margin, -d.dot(u));
    if (margin >= -1e-12 && margin > bestMargin + 1e-12) {
      bestMargin = margin;
      best = d;
    }
  }
  if (best) return *best;
  return Vec::Zero(p);
}

}  // namespace

A1Result checkA1(const std::vector<Vec>& gVectors) {
  requireSpanningInput(gVectors);
  const auto p = gVectors.front().size();
  A1Result out;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vec target = Vec::Zero(p);
      target[i] = sign;
      const auto sol = minSumNonnegative(gVectors, target);
      if (!sol) {
        out.holds = false;
        Vec d = unreachableDirection(gVectors);
        if (d.norm() == 0.0) d = target;
        out.unreachableDirection = d;
        std::ostringstream msg;
        msg << "no non-negative combination reaches direction (" << d.transpose() << ")";
        out.message = msg.str();
        out.unitCoefficients.clear();
        return out;
      }
      out.unitCoefficients.push_back(sol->lambda);
    }
  }
  Vec negSum = Vec::Zero(p);
  for (const auto& v : gVectors) negSum -= v;
  const auto sol = minSumNonnegative(gVectors, negSum);
  if (!sol) {
    // Unreachable in exact arithmetic once all +-e_i are representable.
    out.holds = false;
    out.message = "origin is not interior to the convex hull";
    return out;
  }
  out.interiorWeights.resize(gVectors.size());
  for (std::size_t j = 0; j < gVectors.size(); ++j) out.interiorWeights[j] = sol->lambda[j] + 1.0;
  out.holds = true;
  out.message = "vectors positively span";
  return out;
}

bool coneMembership(const std::vector<Vec>& gVectors, const Vec& y, double eps) {
  requireSpanningInput(gVectors);
  if (y.size() != gVectors.front().size()) throw InvalidInput("target has the wrong dimension");
  if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
  const auto sol = minSumNonnegative(gVectors, y);
  return sol && sol->sum <= eps * (1.0 - 1e-9);
}

AnchorSet makeAnchorSet(const FieldSet& f, const Domain& d, std::vector<Vec> points) {
  if (points.size() != static_cast<std::size_t>(f.spinDim) + 1) {
    throw InvalidInput("need exactly p+1 anchor points");
  }
  AnchorSet out;
  for (auto& x : points) {
    if (d.classify(x) != Region::Boundary) throw DomainError("anchor point is not on the boundary");
    out.gVectors.push_back(f.g(x));
    out.alphaValues.push_back(f.alpha(x));
  }
  out.points = std::move(points);
  const auto a1 = checkA1(out.gVectors);
  if (!a1.holds) throw CertificateError("anchors violate A1: " + a1.message);
  return out;
}

std::optional<AnchorSet> findAnchors(const FieldSet& f, const Domain& d, std::size_t samples) {
  const auto pts = d.sampleBoundary(samples);
  const int p = f.spinDim;
  const int k = p + 1;
  std::vector<Vec> gv;
  for (const auto& x : pts) gv.push_back(f.g(x));

  std::vector<int> idx(static_cast<std::size_t>(k));
  std::vector<int> bestIdx;
  double bestScore = 0.0;
  // Enumerate k-combinations in lexicographic order.
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  const int n = static_cast<int>(pts.size());
  if (n < k) return std::nullopt;
  Eigen::MatrixXd m(p, k);
  while (true) {
    for (int c = 0; c < k; ++c) m.col(c) = gv[static_cast<std::size_t>(idx[static_cast<std::size_t>(c)])];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-10);
    if (lu.rank() == p) {
      const Eigen::VectorXd ker = lu.kernel().col(0);
      // Positive spanning iff the null vector has entries of one strict sign.
      Eigen::VectorXd w(k);
      for (int c = 0; c < k; ++c) w[c] = ker[c] * m.col(c).norm();
      if (w.maxCoeff() < 0.0) w = -w;
      if (w.minCoeff() > 0.0) {
        const double score = w.minCoeff() / w.maxCoeff();
        if (score > bestScore + 1e-12) {
          bestScore = score;
          bestIdx.assign(idx.begin(), idx.end());
        }
      }
    }
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (bestIdx.empty()) return std::nullopt;
  std::vector<Vec> chosen;
  for (int i : bestIdx) chosen.push_back(pts[static_cast<std::size_t>(i)]);
  return makeAnchorSet(f, d, std::move(chosen));
}

Polytope hullHgAlpha(const FieldSet& f, const Domain& d, std::size_t boundarySamples) {
  if (f.spinDim < 1 || f.spinDim > 3) throw InvalidInput("hull supports spin dimension 1..3");
  if (boundarySamples < static_cast<std::size_t>(f.spinDim) + 1) throw InvalidInput("too few boundary samples");
  std::vector<Vec> pts;
  pts.reserve(boundarySamples);
  for (const auto& x : d.sampleBoundary(boundarySamples)) pts.push_back(f.g(x) / f.alpha(x));
  return Polytope::hullOf(pts);
}

}  // namespace sbm
