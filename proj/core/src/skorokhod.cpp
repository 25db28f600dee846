#include "sbm/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "sbm/csv.hpp"
#include "sbm/error.hpp"
#include "sbm/small_lp.hpp"

namespace sbm {

namespace {

constexpr int kClearanceSamples = 1000;
constexpr double kJoinTol = 1e-9;

std::string segmentLabel(std::size_t i) { return "segment " + std::to_string(i) + ": "; }

bool strictlyInterior(const Domain& d, const FreeCurve& c) {
  for (int k = 1; k <= kClearanceSamples; ++k) {
    const double u = static_cast<double>(k) / (kClearanceSamples + 1);
    Vec x = c.at(u);
    if (d.isWristband()) x = d.wrap(x);
    if (!d.inClosure(x) || d.classify(x) != Region::Interior) return false;
  }
  return true;
}

}  // namespace

Vec FreeCurve::at(double u) const {
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
  const double h10 = u3 - 2.0 * u2 + u;
  const double h01 = -2.0 * u3 + 3.0 * u2;
  const double h11 = u3 - u2;
  return h00 * from + h10 * tangentFrom + h01 * to + h11 * tangentTo;
}

// ---- solution ------------------------------------------------------------------

DeterministicSolution::DeterministicSolution(BVDriver driver, const Domain& d, std::vector<Vec> holdG,
                                             std::vector<double> holdAlpha, Vec x0, Vec s0)
    : driver_(std::move(driver)),
      domain_(&d),
      g_(std::move(holdG)),
      alpha_(std::move(holdAlpha)),
      x0_(std::move(x0)),
      s0_(std::move(s0)) {
  double l = 0.0;
  for (std::size_t i = 0; i < driver_.segments.size(); ++i) {
    const auto& seg = driver_.segments[i];
    lStart_.push_back(l);
    if (const auto* h = std::get_if<BoundaryHold>(&seg.data)) {
      factor_.push_back(std::exp(alpha_[i] * h->rate * seg.duration()));
      l += h->rate * seg.duration();
    } else {
      factor_.push_back(1.0);
    }
  }
}

Vec DeterministicSolution::holdSpin(std::size_t seg, double t) const {
  const auto& hold = std::get<BoundaryHold>(driver_.segments[seg].data);
  const double yNow = std::exp(alpha_[seg] * hold.rate * (t - driver_.segments[seg].start));
  // s(t) = [y_1 ... y_{j-1} y_j(t)]^{-1} s0 + sum_m g_m/alpha_m [y_m ... y_{j-1} y_j(t)]^{-1} (y_m - 1)
  double tail = yNow;
  Vec s = (g_[seg] / alpha_[seg]) * ((yNow - 1.0) / yNow);
  for (std::size_t m = seg; m-- > 0;) {
    if (!driver_.segments[m].isHold()) continue;
    tail *= factor_[m];
    s += (g_[m] / alpha_[m]) * ((factor_[m] - 1.0) / tail);
  }
  s += s0_ / tail;
  return s;
}

PathPoint DeterministicSolution::at(double t) const {
  const auto& segs = driver_.segments;
  t = std::clamp(t, 0.0, driver_.totalTime);
  auto it = std::upper_bound(segs.begin(), segs.end(), t,
                             [](double v, const DriverSegment& s) { return v < s.start; });
  std::size_t i = it == segs.begin() ? 0 : static_cast<std::size_t>(it - segs.begin()) - 1;
  const auto& seg = segs[i];
  PathPoint out;
  out.t = t;
  if (const auto* h = std::get_if<BoundaryHold>(&seg.data)) {
    out.x = h->point;
    out.s = holdSpin(i, t);
    out.l = lStart_[i] + h->rate * (t - seg.start);
    return out;
  }
  const auto& curve = std::get<FreeCurve>(seg.data);
  const double u = seg.duration() > 0.0 ? (t - seg.start) / seg.duration() : 1.0;
  out.x = u >= 1.0 ? curve.to : curve.at(u);
  if (domain_->isWristband()) out.x = domain_->wrap(out.x);
  out.l = lStart_[i];
  out.s = s0_;
  for (std::size_t m = i; m-- > 0;) {
    if (segs[m].isHold()) {
      out.s = holdSpin(m, segs[m].end);
      break;
    }
  }
  return out;
}

std::vector<PathPoint> DeterministicSolution::sample(std::size_t count) const {
  if (count < 2) throw InvalidInput("need at least two samples");
  std::vector<PathPoint> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(at(driver_.totalTime * static_cast<double>(k) / static_cast<double>(count - 1)));
  }
  return out;
}

DeterministicSolution solveDeterministic(const BVDriver& drv, const Domain& d, const FieldSet& f, const Vec& x0,
                                         const Vec& s0) {
  if (drv.segments.empty()) throw ValidationError("driver has no segments");
  if (!(drv.totalTime > 0.0)) throw ValidationError("driver total time must be positive");
  if (s0.size() != f.spinDim) throw InvalidInput("initial spin has the wrong dimension");
  if (!d.inClosure(x0)) throw ValidationError("initial point lies outside the closed domain");

  std::vector<Vec> holdG;
  std::vector<double> holdAlpha;
  double expectedStart = 0.0;
  Vec current = x0;
  for (std::size_t i = 0; i < drv.segments.size(); ++i) {
    const auto& seg = drv.segments[i];
    if (std::abs(seg.start - expectedStart) > kJoinTol * std::max(1.0, drv.totalTime) || !(seg.end >= seg.start)) {
      throw ValidationError(segmentLabel(i) + "intervals do not partition [0, T]");
    }
    expectedStart = seg.end;
    if (const auto* h = std::get_if<BoundaryHold>(&seg.data)) {
      if (!(h->rate >= 0.0) || !std::isfinite(h->rate)) {
        throw ValidationError(segmentLabel(i) + "hold rate must be non-negative");
      }
      if (d.classify(h->point) != Region::Boundary) {
        throw ValidationError(segmentLabel(i) + "hold point is not on the boundary");
      }
      if (d.distance(current, h->point) > kJoinTol) {
        throw ValidationError(segmentLabel(i) + "hold point does not continue the path");
      }
      holdG.push_back(f.g(h->point));
      holdAlpha.push_back(f.alpha(h->point));
      current = h->point;
    } else {
      const auto& c = std::get<FreeCurve>(seg.data);
      if (d.distance(current, c.from) > kJoinTol) {
        throw ValidationError(segmentLabel(i) + "curve does not start where the path is");
      }
      if (!strictlyInterior(d, c)) throw ValidationError(segmentLabel(i) + "curve leaves the interior");
      Vec end = c.to;
      if (d.isWristband()) end = d.wrap(end);
      if (!d.inClosure(end)) throw ValidationError(segmentLabel(i) + "curve ends outside the closed domain");
      holdG.push_back(Vec());
      holdAlpha.push_back(1.0);
      current = end;
    }
  }
  if (std::abs(expectedStart - drv.totalTime) > kJoinTol * std::max(1.0, drv.totalTime)) {
    throw ValidationError("segments do not end at the total time");
  }
  return DeterministicSolution(drv, d, std::move(holdG), std::move(holdAlpha), x0, s0);
}

std::vector<double> solveLambda(const Vec& target, const std::vector<Vec>& gVectors) {
  const auto sol = minSumNonnegative(gVectors, target);
  if (!sol) {
    std::ostringstream msg;
    msg << "target " << formatVec(target) << " is not a non-negative combination of the anchor g-values";
    throw CertificateError(msg.str());
  }
  return sol->lambda;
}

FreeCurve makeFreeCurve(const Domain& d, const Vec& from, const Vec& to) {
  if (!d.inClosure(from) || !d.inClosure(to)) throw GeometryError("curve end points must lie in the closure");
  const Vec chord = d.displacement(from, to);
  const Vec zero = Vec::Zero(from.size());
  const Vec nFrom = d.classify(from) == Region::Boundary ? d.inwardNormal(from) : zero;
  const Vec nTo = d.classify(to) == Region::Boundary ? d.inwardNormal(to) : zero;

  FreeCurve c;
  c.from = from;
  c.to = from + chord;
  double bend = std::max(chord.norm(), d.inradius());
  for (int attempt = 0; attempt < 30; ++attempt, bend *= 0.5) {
    c.tangentFrom = chord + bend * nFrom;
    c.tangentTo = chord - bend * nTo;
    if (strictlyInterior(d, c)) return c;
  }
  throw GeometryError("no interior cubic curve found between the given points");
}

BVDriver constructSPbvDriver(const Domain& d, const FieldSet& f, const AnchorSet& anchors, const Vec& x0,
                             const Vec& s0, const Vec& z, double T) {
  const std::size_t holds = static_cast<std::size_t>(f.spinDim) + 1;
  if (anchors.points.size() != holds || anchors.gVectors.size() != holds || anchors.alphaValues.size() != holds) {
    throw InvalidInput("anchor set must hold p+1 points");
  }
  if (!(T > 0.0)) throw InvalidInput("T must be positive");
  if (s0.size() != f.spinDim) throw InvalidInput("initial spin has the wrong dimension");
  if (d.classify(z) != Region::Interior) throw DomainError("target point must be interior");
  if (!d.inClosure(x0)) throw DomainError("start point lies outside the closed domain");

  const auto lambda = solveLambda(-s0, anchors.gVectors);

  const double piece = T / static_cast<double>(2 * holds + 1);
  BVDriver drv;
  drv.totalTime = T;
  double product = 1.0;
  Vec at = x0;
  for (std::size_t m = 0; m < holds; ++m) {
    const double a = static_cast<double>(2 * m + 1) * piece;
    const double b = static_cast<double>(2 * m + 2) * piece;
    drv.segments.push_back({static_cast<double>(2 * m) * piece, a, makeFreeCurve(d, at, anchors.points[m])});
    // alpha_m lambda_m = (y_m - 1) * prod_{i<m} y_i, with y_m = exp(eta_m alpha_m (b - a)).
    const double alpha = anchors.alphaValues[m];
    const double logY = std::log1p(alpha * lambda[m] / product);
    drv.segments.push_back({a, b, BoundaryHold{anchors.points[m], logY / (alpha * (b - a))}});
    product *= std::exp(logY);
    at = anchors.points[m];
  }
  drv.segments.push_back({static_cast<double>(2 * holds) * piece, T, makeFreeCurve(d, at, z)});
  return drv;
}

// ---- text form -----------------------------------------------------------------

namespace {

void writeVecField(std::ostream& out, const char* key, const Vec& v) {
  out << ' ' << key << '=';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? "," : "") << formatReal(v[i]);
}

Vec parseVecField(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  Vec v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

}  // namespace

void writeDriver(std::ostream& out, const BVDriver& drv) {
  out << "driver total_time=" << formatReal(drv.totalTime) << " segments=" << drv.segments.size() << '\n';
  for (std::size_t i = 0; i < drv.segments.size(); ++i) {
    const auto& seg = drv.segments[i];
    out << "segment " << i << (seg.isHold() ? " hold" : " free") << " start=" << formatReal(seg.start)
        << " end=" << formatReal(seg.end);
    if (const auto* h = std::get_if<BoundaryHold>(&seg.data)) {
      writeVecField(out, "point", h->point);
      out << " rate=" << formatReal(h->rate);
    } else {
      const auto& c = std::get<FreeCurve>(seg.data);
      writeVecField(out, "from", c.from);
      writeVecField(out, "to", c.to);
      writeVecField(out, "tangent_from", c.tangentFrom);
      writeVecField(out, "tangent_to", c.tangentTo);
    }
    out << '\n';
  }
}

BVDriver readDriver(std::istream& in) {
  BVDriver drv;
  std::string line;
  std::size_t expected = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::map<std::string, std::string> kv;
    std::string kind;
    if (word == "segment") {
      std::size_t idx = 0;
      ls >> idx >> kind;
    }
    std::string tok;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ValidationError("malformed driver line: " + line);
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    try {
      if (word == "driver") {
        drv.totalTime = std::stod(kv.at("total_time"));
        expected = std::stoul(kv.at("segments"));
        header = true;
      } else if (word == "segment") {
        DriverSegment seg;
        seg.start = std::stod(kv.at("start"));
        seg.end = std::stod(kv.at("end"));
        if (kind == "hold") {
          seg.data = BoundaryHold{parseVecField(kv.at("point")), std::stod(kv.at("rate"))};
        } else if (kind == "free") {
          seg.data = FreeCurve{parseVecField(kv.at("from")), parseVecField(kv.at("to")),
                               parseVecField(kv.at("tangent_from")), parseVecField(kv.at("tangent_to"))};
        } else {
          throw ValidationError("unknown segment kind: " + kind);
        }
        drv.segments.push_back(std::move(seg));
      } else {
        throw ValidationError("unexpected driver line: " + line);
      }
    } catch (const std::out_of_range&) {
      throw ValidationError("missing field in driver line: " + line);
    } catch (const std::invalid_argument&) {
      throw ValidationError("bad number in driver line: " + line);
    }
  }
  if (!header || drv.segments.size() != expected) throw ValidationError("driver block is incomplete");
  return drv;
}

}  // namespace sbm
