#include "sbm/diagnostics.hpp"

#include <cmath>

#include "sbm/error.hpp"

namespace sbm {

Vec spinReachMap(const std::vector<double>& alphaValues, const std::vector<Vec>& gVectors, const Vec& t) {
  const auto p = static_cast<Eigen::Index>(alphaValues.size());
  Vec v = Vec::Zero(gVectors.front().size());
  for (Eigen::Index j = 0; j < p; ++j) {
    double tail = 0.0;
    for (Eigen::Index k = j; k < p; ++k) tail += alphaValues[k] * t[k];
    const double aj = alphaValues[j];
    v += std::exp(-tail) * std::expm1(aj * t[j]) / aj * gVectors[j];
  }
  return v;
}

double jacobianCheck(const std::vector<double>& alphaValues, const std::vector<Vec>& gVectors,
                     const std::vector<Vec>& tPoints) {
  const auto p = static_cast<Eigen::Index>(alphaValues.size());
  if (p < 1 || p > kMaxDim || gVectors.size() != alphaValues.size()) {
    throw InvalidInput("need p alpha values and p g-vectors");
  }
  Mat tg(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (gVectors[j].size() != p) throw InvalidInput("g-vectors must have dimension p");
    if (!(alphaValues[j] > 0.0)) throw InvalidInput("alpha values must be positive");
    tg.col(j) = gVectors[j];
  }
  const double detT = tg.determinant();
  if (std::abs(detT) <= 1e-12 * std::pow(tg.norm(), static_cast<double>(p))) {
    throw InvalidInput("g-vectors are linearly dependent");
  }

  constexpr double h = 1e-6;
  double worst = 0.0;
  for (const Vec& t : tPoints) {
    if (t.size() != p) throw InvalidInput("t-points must have dimension p");
    Mat jac(p, p);
    for (Eigen::Index k = 0; k < p; ++k) {
      Vec up = t, down = t;
      up[k] += h;
      down[k] -= h;
      jac.col(k) = (spinReachMap(alphaValues, gVectors, up) - spinReachMap(alphaValues, gVectors, down)) / (2.0 * h);
    }
    double weighted = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) weighted += static_cast<double>(k + 1) * alphaValues[k] * t[k];
    const double exact = detT * std::exp(-weighted);
    worst = std::max(worst, std::abs(jac.determinant() - exact) / std::abs(exact));
  }
  return worst;
}

DampingBoundMonitor::DampingBoundMonitor(double gSupNorm, double alphaInf, double tol)
    : radius2_((gSupNorm / alphaInf) * (gSupNorm / alphaInf)), alphaInf_(alphaInf), tol_(tol) {}

void DampingBoundMonitor::onStart(const SimConfig& /*cfg*/, const StepRecord& initial) {
  s0sq_ = initial.s.squaredNorm();
  violations_ = checked_ = 0;
  worst_ = -1e300;
}

void DampingBoundMonitor::onStep(const StepRecord& rec) {
  const double bound = s0sq_ * std::exp(-alphaInf_ * rec.L) + radius2_;
  const double excess = rec.s.squaredNorm() - bound;
  ++checked_;
  if (excess > worst_) worst_ = excess;
  if (excess > tol_) ++violations_;
}

void HullProximityCounter::onStart(const SimConfig& cfg, const StepRecord& /*initial*/) {
  first_ = cfg.firstRecordedStep();
  inside_ = total_ = 0;
  fresh_ = false;
}

void HullProximityCounter::onStep(const StepRecord& rec) {
  if (rec.step < first_) return;
  if (!fresh_ || rec.dL > 0.0) {
    near_ = hull_->distance(rec.s) <= dist_;
    fresh_ = true;
  }
  ++total_;
  if (near_) ++inside_;
}

double fractionNearHull(const Polytope& hull, const std::vector<Vec>& spins, double dist) {
  if (spins.empty()) throw InsufficientData("no spins");
  std::size_t n = 0;
  for (const auto& s : spins) n += hull.distance(s) <= dist ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(spins.size());
}

namespace {

class HittingObserver : public StepObserver {
 public:
  explicit HittingObserver(double r) : r_(r) {}
  void onStart(const SimConfig& /*cfg*/, const StepRecord& initial) override {
    entered_ = initial.s.norm() < r_;
  }
  void onStep(const StepRecord& rec) override {
    if (!entered_ && rec.s.norm() < r_) entered_ = true;
  }
  bool entered() const { return entered_; }

 private:
  double r_;
  bool entered_ = false;
};

}  // namespace

HittingResult hittingEstimate(const Domain& d, const FieldSet& f, const Vec& z, double r, double T, double dt,
                              const std::vector<HittingStart>& starts, std::size_t trials, std::uint64_t seed) {
  if (!(r > 0.0) || !(T > 0.0) || trials == 0) throw InvalidInput("need r > 0, T > 0 and at least one trial");
  if (d.classify(z) != Region::Interior || d.boundaryDistance(z) < r) {
    throw DomainError("the ball B(z, r) must lie inside the domain");
  }
  HittingResult out;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    std::size_t hits = 0, entries = 0;
    for (std::size_t k = 0; k < trials; ++k) {
      SimConfig cfg;
      cfg.dt = std::min(dt, T);
      cfg.horizon = T;
      cfg.seed = seed + i * trials + k;
      cfg.initialX = starts[i].x;
      cfg.initialS = starts[i].s;
      HittingObserver obs(r);
      const SimSummary sum = simulate(cfg, d, f, obs);
      if (d.distance(sum.finalX, z) < r && sum.finalS.norm() < r) ++hits;
      if (obs.entered()) ++entries;
    }
    out.frequencies.push_back(static_cast<double>(hits) / static_cast<double>(trials));
    out.spinEntryFrequencies.push_back(static_cast<double>(entries) / static_cast<double>(trials));
  }
  return out;
}

}  // namespace sbm
