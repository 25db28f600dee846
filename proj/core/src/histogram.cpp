#include "sbm/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sbm/csv.hpp"
#include "sbm/error.hpp"

namespace sbm {

Coordinate Coordinate::parse(const std::string& name) {
  if (name.size() < 2 || (name[0] != 'x' && name[0] != 's')) {
    throw InvalidInput("coordinate must be x<k> or s<k>: " + name);
  }
  int k = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') throw InvalidInput("coordinate must be x<k> or s<k>: " + name);
    k = 10 * k + (name[i] - '0');
  }
  if (k < 1 || k > kMaxDim) throw InvalidInput("coordinate index out of range: " + name);
  return {name[0] == 'x' ? Kind::Position : Kind::Spin, k - 1};
}

std::string Coordinate::name() const {
  return (kind == Kind::Position ? "x" : "s") + std::to_string(index + 1);
}

std::optional<std::size_t> Axis::index(double v) const {
  if (!(v >= lo && v <= hi)) return std::nullopt;
  const auto i = static_cast<std::size_t>((v - lo) / width());
  return std::min(i, bins - 1);
}

OccupancyHistogram::OccupancyHistogram(std::vector<Axis> axes, std::vector<Coordinate> coords)
    : axes_(std::move(axes)), coords_(std::move(coords)) {
  if (axes_.empty()) throw InvalidInput("histogram needs at least one axis");
  if (axes_.size() != coords_.size()) throw InvalidInput("one coordinate per axis required");
  std::size_t cells = 1;
  for (const auto& a : axes_) {
    if (a.bins == 0 || !(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
      throw InvalidInput("axis " + a.name + " needs lo < hi and at least one bin");
    }
    cells *= a.bins;
  }
  weights_.assign(cells, 0.0);
}

namespace {

std::vector<Coordinate> coordsFromNames(const std::vector<Axis>& axes) {
  std::vector<Coordinate> out;
  for (const auto& a : axes) out.push_back(Coordinate::parse(a.name));
  return out;
}

}  // namespace

OccupancyHistogram::OccupancyHistogram(std::vector<Axis> axes)
    : OccupancyHistogram(axes, coordsFromNames(axes)) {}

std::size_t OccupancyHistogram::flatIndex(const std::vector<std::size_t>& idx) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) flat = flat * axes_[k].bins + idx[k];
  return flat;
}

std::vector<std::size_t> OccupancyHistogram::multiIndex(std::size_t flat) const {
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t k = axes_.size(); k-- > 0;) {
    idx[k] = flat % axes_[k].bins;
    flat /= axes_[k].bins;
  }
  return idx;
}

void OccupancyHistogram::add(const Vec& x, const Vec& s, double weight) {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const auto i = axes_[k].index(coords_[k].of(x, s));
    if (!i) {
      overflow_ += weight;
      ++overflowCount_;
      return;
    }
    flat = flat * axes_[k].bins + *i;
  }
  weights_[flat] += weight;
  total_ += weight;
}

void OccupancyHistogram::accumulate(const Trajectory& traj, double burnIn) {
  const double w = traj.recordWeight();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] < burnIn) continue;
    add(traj.positions[i], traj.spins[i], w);
  }
}

void OccupancyHistogram::merge(const OccupancyHistogram& other) {
  if (!(axes_ == other.axes_) || !(coords_ == other.coords_)) throw InvalidInput("histogram axes differ");
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] += other.weights_[i];
  total_ += other.total_;
  overflow_ += other.overflow_;
  overflowCount_ += other.overflowCount_;
}

OccupancyHistogram merge(const OccupancyHistogram& a, const OccupancyHistogram& b) {
  OccupancyHistogram out = a;
  out.merge(b);
  return out;
}

std::vector<double> OccupancyHistogram::masses() const {
  std::vector<double> m(weights_.size(), 0.0);
  if (total_ > 0.0) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = weights_[i] / total_;
  }
  return m;
}

void OccupancyHistogram::writeCsv(std::ostream& out) const {
  for (std::size_t k = 0; k < axes_.size(); ++k) out << "axis" << k + 1 << "_mid,";
  out << "weight,prob\n";
  const auto m = masses();
  for (std::size_t flat = 0; flat < weights_.size(); ++flat) {
    const auto idx = multiIndex(flat);
    for (std::size_t k = 0; k < axes_.size(); ++k) out << formatReal(axes_[k].mid(idx[k])) << ',';
    out << formatReal(weights_[flat]) << ',' << formatReal(m[flat]) << '\n';
  }
}

void HistogramAccumulator::onStart(const SimConfig& cfg, const StepRecord& /*initial*/) {
  first_ = cfg.firstRecordedStep();
  weight_ = cfg.dt;
}

void HistogramAccumulator::onStep(const StepRecord& rec) {
  if (rec.step >= first_) hist_->add(rec.x, rec.s, weight_);
}

double l1Distance(const OccupancyHistogram& a, const OccupancyHistogram& b, const std::vector<std::size_t>& excluded) {
  if (!(a.axes() == b.axes())) throw InvalidInput("histogram axes differ");
  if (a.totalWeight() <= 0.0 || b.totalWeight() <= 0.0) throw InsufficientData("empty histogram");
  const auto ma = a.masses();
  const auto mb = b.masses();
  double l1 = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (std::find(excluded.begin(), excluded.end(), i) != excluded.end()) continue;
    l1 += std::abs(ma[i] - mb[i]);
  }
  return l1;
}

}  // namespace sbm
