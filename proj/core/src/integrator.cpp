#include "sbm/integrator.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "sbm/error.hpp"

namespace sbm {

namespace {

constexpr int kMaxHalvings = 40;

}  // namespace

std::int64_t SimConfig::stepCount() const { return std::llround(horizon / dt); }

std::int64_t SimConfig::firstRecordedStep() const {
  const auto k = static_cast<std::int64_t>(std::ceil(burnIn / dt - 1e-9));
  return std::max<std::int64_t>(1, k);
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidInput("horizon must be positive");
  if (dt > horizon) throw InvalidInput("dt must not exceed the horizon");
  if (!(burnIn >= 0.0) || burnIn >= horizon) throw InvalidInput("burn_in must lie in [0, horizon)");
  if (brownianSubsteps < 1) throw InvalidInput("brownian_substeps must be at least 1");
  if (recordStride < 1) throw InvalidInput("record_stride must be at least 1");
  if (initialX.size() == 0 || !initialX.allFinite()) throw InvalidInput("initial position missing or non-finite");
  if (initialS.size() == 0 || !initialS.allFinite()) throw InvalidInput("initial spin missing or non-finite");
}

void ObserverList::onStart(const SimConfig& cfg, const StepRecord& initial) {
  for (auto* o : observers_) o->onStart(cfg, initial);
}

void ObserverList::onStep(const StepRecord& rec) {
  for (auto* o : observers_) o->onStep(rec);
}

void ObserverList::onFinish() {
  for (auto* o : observers_) o->onFinish();
}

TrajectoryRecorder::TrajectoryRecorder(bool wallLocalTimes) : wallLocalTimes_(wallLocalTimes) {}

void TrajectoryRecorder::onStart(const SimConfig& cfg, const StepRecord& initial) {
  traj_ = Trajectory{};
  traj_.dt = cfg.dt;
  traj_.recordStride = cfg.recordStride;
  traj_.horizon = static_cast<double>(cfg.stepCount()) * cfg.dt;
  first_ = cfg.firstRecordedStep();
  stride_ = cfg.recordStride;
  top_ = bottom_ = 0.0;
  lastL_ = initial.L;
  lastT_ = initial.t;
  const auto expected = static_cast<std::size_t>(std::max<std::int64_t>(0, cfg.stepCount() - first_ + 1)) / stride_ + 1;
  traj_.times.reserve(expected);
  traj_.positions.reserve(expected);
  traj_.spins.reserve(expected);
  traj_.localTime.reserve(expected);
}

void TrajectoryRecorder::onStep(const StepRecord& rec) {
  if (rec.wall == Wall::Top) top_ += rec.dL;
  if (rec.wall == Wall::Bottom) bottom_ += rec.dL;
  if (rec.step >= first_ && static_cast<std::size_t>(rec.step - first_) % stride_ == 0) {
    if (traj_.times.empty()) {
      traj_.startTime = lastT_;
      traj_.startLocalTime = lastL_;
    }
    traj_.times.push_back(rec.t);
    traj_.positions.push_back(rec.x);
    traj_.spins.push_back(rec.s);
    traj_.localTime.push_back(rec.L);
    if (wallLocalTimes_) {
      traj_.localTimeTop.push_back(top_);
      traj_.localTimeBottom.push_back(bottom_);
    }
  }
  lastL_ = rec.L;
  lastT_ = rec.t;
}

Vec spinUpdate(const Vec& s, const Vec& gVal, double alphaVal, double dL) {
  if (!std::isfinite(dL)) throw InvalidInput("local-time increment must be finite");
  const double decay = std::exp(-alphaVal * dL);
  const double gain = -std::expm1(-alphaVal * dL);
  return decay * s + (gain / alphaVal) * gVal;
}

StepOutcome reflectedStep(const ReflectedState& state, const Vec& dB, const FieldSet& f, const Domain& d,
                          ReflectionScheme scheme) {
  StepOutcome out;
  Vec tentative = f.sigma ? Vec(state.x + f.sigma(state.x) * dB) : Vec(state.x + dB);
  const bool band = d.isWristband();

  if (d.inClosure(tentative)) {
    if (band) {
      const double period = d.asWristband().period;
      if (tentative[0] < 0.0 || tentative[0] >= period) tentative = d.wrap(tentative);
    }
    out.x = std::move(tentative);
    out.s = state.s;
    out.L = state.L;
    return out;
  }

  Projection proj = d.projectToClosure(tentative);
  if (band && proj.pushDistance > 2.0 * d.asWristband().halfWidth) {
    throw GeometryError("tentative point beyond the opposite wall");
  }
  const double dL = proj.pushDistance;
  Vec base = band ? d.wrap(proj.point) : proj.point;

  Vec next = base + f.tauAt(base, state.s) * dL;
  if (!d.inClosure(next)) next = d.projectToClosure(next).point;
  if (band) next = d.wrap(next);

  const Vec gx = f.g(base);
  const double ax = f.alpha(base);
  if (scheme == ReflectionScheme::HalfStep) {
    out.s = spinUpdate(state.s, gx, ax, dL);
  } else {
    out.s = state.s + (gx - ax * state.s) * dL;
  }
  out.x = std::move(next);
  out.dL = dL;
  out.L = state.L + dL;
  if (band) {
    out.wall = base[1] > 0.0 ? Wall::Top : Wall::Bottom;
  } else {
    out.wall = Wall::Other;
  }
  return out;
}

SimSummary simulate(const SimConfig& cfg, const Domain& d, const FieldSet& f, StepObserver& observer) {
  cfg.validate();
  if (cfg.initialX.size() != d.dim()) throw InvalidInput("initial position has the wrong dimension");
  if (cfg.initialS.size() != f.spinDim) throw InvalidInput("initial spin has the wrong dimension");
  if (!d.inClosure(cfg.initialX)) throw InvalidInput("initial position lies outside the closed domain");

  const auto started = std::chrono::steady_clock::now();
  const std::int64_t n = cfg.stepCount();
  const int substeps = cfg.brownianSubsteps;
  const double scale = std::sqrt(cfg.dt / substeps);
  GaussianSource normal(cfg.seed);

  StepRecord rec;
  rec.x = d.isWristband() ? d.wrap(cfg.initialX) : cfg.initialX;
  rec.s = cfg.initialS;
  observer.onStart(cfg, rec);

  SimSummary summary;
  const bool band = d.isWristband();
  const double period = band ? d.asWristband().period : 0.0;
  Vec dB(d.dim());
  Vec tentative(d.dim());
  for (std::int64_t k = 1; k <= n; ++k) {
    if (substeps == 1) {
      for (Eigen::Index i = 0; i < dB.size(); ++i) dB[i] = scale * normal();
    } else {
      dB.setZero();
      for (int j = 0; j < substeps; ++j) {
        for (Eigen::Index i = 0; i < dB.size(); ++i) dB[i] += normal();
      }
      dB *= scale;
    }

    // Interior moves are the common case; handle them without building a StepOutcome.
    if (f.sigma) {
      tentative.noalias() = rec.x + f.sigma(rec.x) * dB;
    } else {
      tentative.noalias() = rec.x + dB;
    }
    if (d.inClosure(tentative)) {
      if (band && (tentative[0] < 0.0 || tentative[0] >= period)) tentative = d.wrap(tentative);
      if (!tentative.allFinite()) throw NumericError("non-finite state at step " + std::to_string(k), k);
      rec.x = tentative;
      rec.dL = 0.0;
      rec.wall = Wall::None;
    } else {
      if (!tentative.allFinite()) throw NumericError("non-finite state at step " + std::to_string(k), k);
      StepOutcome o;
      const ReflectedState state{rec.x, rec.s, rec.L};
      for (int halvings = 0;; ++halvings) {
        try {
          o = reflectedStep(state, dB, f, d, cfg.scheme);
          if (halvings > 0) ++summary.halvedSteps;
          break;
        } catch (const GeometryError&) {
          if (halvings >= kMaxHalvings) throw;
          dB *= 0.5;
        }
      }
      if (!o.x.allFinite() || !o.s.allFinite() || !std::isfinite(o.L)) {
        throw NumericError("non-finite state at step " + std::to_string(k), k);
      }
      if (o.dL > 0.0) {
        ++summary.contactSteps;
        if (o.wall == Wall::Top) summary.localTimeTop += o.dL;
        if (o.wall == Wall::Bottom) summary.localTimeBottom += o.dL;
      }
      rec.x = std::move(o.x);
      rec.s = std::move(o.s);
      rec.L = o.L;
      rec.dL = o.dL;
      rec.wall = o.wall;
    }
    rec.step = k;
    rec.t = static_cast<double>(k) * cfg.dt;
    observer.onStep(rec);
  }
  observer.onFinish();

  summary.steps = n;
  summary.finalX = rec.x;
  summary.finalS = rec.s;
  summary.finalL = rec.L;
  summary.wallSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return summary;
}

Trajectory simulate(const SimConfig& cfg, const Domain& d, const FieldSet& f) {
  TrajectoryRecorder recorder(d.isWristband());
  simulate(cfg, d, f, recorder);
  return recorder.take();
}

}  // namespace sbm
