#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "sbm/csv.hpp"
#include "sbm/diagnostics.hpp"
#include "sbm/skorokhod.hpp"

namespace sbm::cli {

namespace fs = std::filesystem;

std::size_t workersFromEnvironment() {
  if (const char* env = std::getenv("SBM_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunConfig applyOverrides(RunConfig cfg, const CommandOptions& opt) {
  if (opt.seedOverride) cfg.sim.seed = *opt.seedOverride;
  if (opt.chains) {
    if (*opt.chains < 1) throw InvalidInput("--chains must be at least 1");
    cfg.sim.chains = *opt.chains;
  }
  return cfg;
}

namespace {

class SpinRegionCounter : public StepObserver {
 public:
  void onStart(const SimConfig& cfg, const StepRecord& /*initial*/) override { first_ = cfg.firstRecordedStep(); }
  void onStep(const StepRecord& rec) override {
    if (rec.step < first_ || rec.s.size() != 2) return;
    ++samples;
    const double dx = rec.s[0] - 0.5, dy = rec.s[1];
    if (dx * dx + dy * dy < kPointRadius * kPointRadius) ++nearPoint;
    if (std::min(std::abs(rec.s[0]), std::abs(rec.s[1])) < kAxesBand) ++nearAxes;
  }
  std::int64_t samples = 0, nearPoint = 0, nearAxes = 0;

 private:
  std::int64_t first_ = 1;
};

std::string realText(double v) { return formatReal(v); }

void openOut(std::ofstream& f, const fs::path& p) {
  f.open(p, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + p.string());
}

}  // namespace

StationaryEstimate estimateStationary(const RunConfig& cfg, std::size_t workers) {
  const Domain d = buildDomain(cfg);
  const FieldSet f = buildFields(cfg, d);
  const Polytope hull = hullHgAlpha(f, d, 720);
  const auto axes = histogramAxes(cfg);
  const auto& eps = cfg.analysis.epsGrid;
  const bool excursions = !eps.empty();

  auto runChain = [&](std::size_t i) {
    const SimConfig sc = chainConfig(cfg, i);
    ChainStats st(OccupancyHistogram{axes});
    HistogramAccumulator hist(st.histogram);
    DampingBoundMonitor damping(f.gSupNorm, f.alphaInf);
    HullProximityCounter near(hull, cfg.analysis.hullDistance);
    SpinRegionCounter regions;
    ExcursionTracker tracker(d, excursions ? *std::min_element(eps.begin(), eps.end()) : 0.0);
    std::vector<StepObserver*> obs{&hist, &damping, &near, &regions};
    if (excursions) obs.push_back(&tracker);
    ObserverList all(obs);
    const SimSummary sum = simulate(sc, d, f, all);
    st.dampingViolations = damping.violations();
    st.dampingWorstExcess = damping.worstExcess();
    st.spinSamples = near.total();
    st.nearHull = near.inside();
    st.nearPoint = regions.nearPoint;
    st.nearAxes = regions.nearAxes;
    st.localTime = sum.finalL;
    st.wallSeconds = sum.wallSeconds;
    st.halvedSteps = sum.halvedSteps;
    if (excursions) {
      const ExcursionSet set = tracker.take();
      st.rates = exitRates(set, d, eps, WallFilter::Any);
      if (d.isWristband()) {
        st.ratesTop = exitRates(set, d, eps, WallFilter::Top);
        st.ratesBottom = exitRates(set, d, eps, WallFilter::Bottom);
      }
    }
    return st;
  };

  std::vector<std::optional<ChainStats>> raw = runIndexed<std::optional<ChainStats>>(
      cfg.sim.chains, workers, [&](std::size_t i) { return std::optional<ChainStats>(runChain(i)); });

  StationaryEstimate est(OccupancyHistogram{axes});
  std::int64_t samples = 0, hullIn = 0, point = 0, axesIn = 0;
  std::vector<std::vector<RateRow>> all, top, bottom;
  for (auto& c : raw) {
    ChainStats& st = *c;
    est.histogram.merge(st.histogram);
    est.dampingViolations += st.dampingViolations;
    est.dampingWorstExcess = std::max(est.dampingWorstExcess, st.dampingWorstExcess);
    samples += st.spinSamples;
    hullIn += st.nearHull;
    point += st.nearPoint;
    axesIn += st.nearAxes;
    if (excursions) {
      all.push_back(st.rates);
      if (!st.ratesTop.empty()) top.push_back(st.ratesTop);
      if (!st.ratesBottom.empty()) bottom.push_back(st.ratesBottom);
    }
    est.chains.push_back(std::move(st));
  }
  if (samples > 0) {
    est.hullFraction = static_cast<double>(hullIn) / static_cast<double>(samples);
    est.pointFraction = static_cast<double>(point) / static_cast<double>(samples);
    est.axesFraction = static_cast<double>(axesIn) / static_cast<double>(samples);
  }
  if (excursions) {
    est.rates = poolRates(all);
    if (!top.empty()) est.ratesTop = poolRates(top);
    if (!bottom.empty()) est.ratesBottom = poolRates(bottom);
  }
  return est;
}

double wallAsymmetry(const StationaryEstimate& est) {
  double worst = 0.0;
  for (std::size_t i = 0; i < est.ratesTop.size() && i < est.ratesBottom.size(); ++i) {
    const double a = est.ratesTop[i].rate, b = est.ratesBottom[i].rate;
    worst = std::max(worst, std::abs(a - b) / (0.5 * (a + b)));
  }
  return worst;
}

// ---- simulate ------------------------------------------------------------------

int cmdSimulate(const CommandOptions& opt, std::ostream& out, std::ostream& /*err*/) {
  const RunConfig cfg = applyOverrides(loadConfig(opt.configPath), opt);
  const Domain d = buildDomain(cfg);
  const FieldSet f = buildFields(cfg, d);
  validateFieldSet(f, d);
  fs::create_directories(opt.outDir);

  auto task = [&](std::size_t i) {
    const SimConfig sc = chainConfig(cfg, i);
    TrajectoryRecorder rec(d.isWristband());
    const SimSummary sum = simulate(sc, d, f, rec);
    std::ofstream csv;
    openOut(csv, fs::path(opt.outDir) / ("trajectory_chain" + std::to_string(i) + ".csv"));
    writeTrajectoryCsv(csv, rec.trajectory());
    return sum;
  };
  const auto sums = runIndexed<SimSummary>(cfg.sim.chains, opt.workers, task);

  std::ostringstream report;
  report << "# effective configuration\n";
  cfg.echo(report);
  report << "# summary\n";
  report << "rng = " << GaussianSource::kMethod << "\n";
  for (std::size_t i = 0; i < sums.size(); ++i) {
    const auto& s = sums[i];
    report << "chain " << i << " seed " << cfg.sim.seed + i << " steps " << s.steps << " final_x "
           << formatVec(s.finalX) << " final_s " << formatVec(s.finalS) << " final_L " << realText(s.finalL)
           << " contact_steps " << s.contactSteps << " halved_steps " << s.halvedSteps << " wall_seconds "
           << realText(s.wallSeconds) << "\n";
  }
  std::ofstream summary;
  openOut(summary, fs::path(opt.outDir) / "summary.txt");
  summary << report.str();
  if (!opt.quiet) out << report.str();
  return kOk;
}

// ---- estimate-stationary -----------------------------------------------------

namespace {

bool densityApplies(const RunConfig& cfg) {
  if (cfg.fields.preset != "wristband-1d-spin" || !cfg.analysis.compareDensity) return false;
  const auto axes = histogramAxes(cfg);
  return axes.size() == 2 && axes[0].name == "x2" && axes[1].name == "s1" && cfg.domain.halfWidth == 1.0;
}

}  // namespace

int cmdEstimateStationary(const CommandOptions& opt, std::ostream& out, std::ostream& /*err*/) {
  const RunConfig cfg = applyOverrides(loadConfig(opt.configPath), opt);
  {
    const Domain d = buildDomain(cfg);
    validateFieldSet(buildFields(cfg, d), d);
  }
  fs::create_directories(opt.outDir);
  const StationaryEstimate est = estimateStationary(cfg, opt.workers);

  std::ofstream csv;
  openOut(csv, fs::path(opt.outDir) / "histogram.csv");
  est.histogram.writeCsv(csv);

  std::ostringstream report;
  report << "# effective configuration\n";
  cfg.echo(report);
  report << "# estimate\n";
  report << "rng = " << GaussianSource::kMethod << "\n";
  report << "chains = " << cfg.sim.chains << "\n";
  report << "total_weight = " << realText(est.histogram.totalWeight()) << "\n";
  report << "overflow_weight = " << realText(est.histogram.overflowWeight()) << "\n";
  report << "damping_violations = " << est.dampingViolations << "\n";
  report << "damping_worst_excess = " << realText(est.dampingWorstExcess) << "\n";
  report << "hull_fraction = " << realText(est.hullFraction) << "\n";
  if (cfg.fields.preset != "wristband-1d-spin") {
    report << "point_fraction = " << realText(est.pointFraction) << "\n";
    report << "axes_fraction = " << realText(est.axesFraction) << "\n";
  }
  if (densityApplies(cfg)) {
    const WristbandDensity dens(cfg.fields.alphaTop, cfg.fields.betaBottom, cfg.analysis.bScale);
    const auto cmp = compareToDensity(est.histogram, dens);
    report << "density_normalizer = " << realText(dens.normalizer()) << "\n";
    report << "density_l1 = " << realText(cmp.l1) << "\n";
    report << "density_corner_l1 = " << realText(cmp.cornerL1) << "\n";
    report << "density_corner_cells =";
    for (auto c : cmp.cornerCells) report << ' ' << c;
    report << "\n";
  }
  if (!est.rates.empty()) {
    std::ofstream rates;
    openOut(rates, fs::path(opt.outDir) / "rates.csv");
    writeRateCsv(rates, est.rates);
    report << "excursion_slope = " << realText(logLogSlope(est.rates)) << "\n";
    if (!est.ratesTop.empty() && !est.ratesBottom.empty()) {
      report << "excursion_wall_asymmetry = " << realText(wallAsymmetry(est)) << "\n";
    }
  }
  std::ofstream rep;
  openOut(rep, fs::path(opt.outDir) / "report.txt");
  rep << report.str();
  if (!opt.quiet) out << report.str();
  return kOk;
}

// ---- verify --------------------------------------------------------------------

namespace {

class CheckPrinter {
 public:
  explicit CheckPrinter(std::ostream& out) : out_(out) {}
  void check(const std::string& name, bool pass, double value, double tol) {
    out_ << "CHECK " << name << ' ' << (pass ? "PASS" : "FAIL") << ' ' << formatReal(value) << ' '
         << formatReal(tol) << '\n';
    allPass_ = allPass_ && pass;
  }
  void note(const std::string& text) { out_ << "# " << text << '\n'; }
  bool allPass() const { return allPass_; }

 private:
  std::ostream& out_;
  bool allPass_ = true;
};

Vec randomInterior(const Domain& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (d.isWristband()) {
    const auto& w = d.asWristband();
    return vec({w.period * u(rng), w.halfWidth * (1.8 * u(rng) - 0.9)});
  }
  const double r = 0.9 * std::sqrt(u(rng));
  const double a = 2.0 * std::numbers::pi * u(rng);
  return vec({r * std::cos(a), r * std::sin(a)});
}

void checkSpbv(const Domain& d, const FieldSet& f, const RunConfig& cfg, CheckPrinter& pr) {
  const auto anchors = findAnchors(f, d);
  if (!anchors) {
    std::vector<Vec> sample;
    const auto pts = d.sampleBoundary(static_cast<std::size_t>(f.spinDim) + 1);
    for (const auto& x : pts) sample.push_back(f.g(x));
    const A1Result res = checkA1(sample);
    std::string witness = res.unreachableDirection ? formatVec(*res.unreachableDirection) : std::string("none");
    pr.note("no p+1 boundary points with positively spanning g-values; witness direction " + witness);
    pr.check("a1", false, 0.0, 0.0);
    pr.note("spbv_roundtrip skipped: it needs an anchor set satisfying A1");
    return;
  }
  pr.check("a1", true, 1.0, 0.0);
  std::mt19937_64 rng(cfg.sim.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worstS = 0.0, worstX = 0.0;
  for (std::size_t k = 0; k < cfg.analysis.roundTrips; ++k) {
    const Vec x0 = randomInterior(d, rng);
    const Vec z = randomInterior(d, rng);
    Vec s0(f.spinDim);
    for (Eigen::Index i = 0; i < s0.size(); ++i) s0[i] = (2.0 * u(rng) - 1.0) * std::max(1.0, f.spinRadius());
    const double T = 0.5 + 4.5 * u(rng);
    const BVDriver drv = constructSPbvDriver(d, f, *anchors, x0, s0, z, T);
    const PathPoint end = solveDeterministic(drv, d, f, x0, s0).final();
    worstS = std::max(worstS, end.s.norm());
    worstX = std::max(worstX, d.distance(end.x, z));
  }
  pr.check("spbv_roundtrip_spin", worstS < 1e-9, worstS, 1e-9);
  pr.check("spbv_roundtrip_position", worstX < 1e-9, worstX, 1e-9);
}

void checkJacobian(int p, std::uint64_t seed, std::size_t points, CheckPrinter& pr) {
  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(p));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> alphas;
  std::vector<Vec> gs;
  for (int j = 0; j < p; ++j) {
    alphas.push_back(0.5 + 1.5 * u(rng));
    Vec g = Vec::Zero(p);
    g[j] = 1.0;
    for (int i = 0; i < p; ++i) g[i] += 0.5 * (2.0 * u(rng) - 1.0);
    gs.push_back(g);
  }
  std::vector<Vec> ts;
  for (std::size_t k = 0; k < points; ++k) {
    Vec t(p);
    for (int i = 0; i < p; ++i) t[i] = 0.01 + 0.99 * u(rng);
    ts.push_back(t);
  }
  const double err = jacobianCheck(alphas, gs, ts);
  pr.check("jacobian_p" + std::to_string(p), err < 1e-5, err, 1e-5);
}

void checkDensity(const RunConfig& cfg, CheckPrinter& pr) {
  const double al = cfg.fields.alphaTop, be = cfg.fields.betaBottom;
  const WristbandDensity dens(al, be, cfg.analysis.bScale);
  const double normErr = std::abs(dens.normalizer() - 2.0 * std::numbers::pi);
  pr.check("density_normalizer", normErr < 1e-10, normErr, 1e-10);
  const double margin = 0.01 * (al + be);
  std::vector<double> grid;
  const std::size_t n = cfg.analysis.identityPoints;
  for (std::size_t i = 0; i < n; ++i) {
    grid.push_back(-be + margin + (al + be - 2.0 * margin) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  const auto rep = verifyDensityIdentities(dens, grid);
  for (const auto& fam : rep.families) {
    if (!fam.passed) {
      std::ostringstream msg;
      msg << "density_" << fam.name << " worst point y = " << formatReal(fam.worstY)
          << ", s = " << formatReal(fam.worstS);
      pr.note(msg.str());
    }
    pr.check("density_" + fam.name, fam.passed, fam.worstError, fam.tolerance);
  }
}

}  // namespace

int cmdVerify(const CommandOptions& opt, std::ostream& out, std::ostream& /*err*/) {
  const RunConfig cfg = applyOverrides(loadConfig(opt.configPath), opt);
  const Domain d = buildDomain(cfg);
  const FieldSet f = buildFields(cfg, d);
  validateFieldSet(f, d);

  std::ostringstream buf;
  CheckPrinter pr(buf);
  pr.note("config " + cfg.source + ", fields " + cfg.fields.preset);

  checkSpbv(d, f, cfg, pr);
  checkJacobian(2, cfg.sim.seed, cfg.analysis.jacobianPoints, pr);
  checkJacobian(3, cfg.sim.seed, cfg.analysis.jacobianPoints, pr);
  if (cfg.fields.preset == "wristband-1d-spin") checkDensity(cfg, pr);

  const StationaryEstimate est = estimateStationary(cfg, opt.workers);
  pr.check("damping_bound", est.dampingViolations == 0, est.dampingWorstExcess, 1e-9);
  pr.check("hull_support", est.hullFraction >= 0.99, est.hullFraction, 0.99);
  if (cfg.fields.preset == "point-concentration") {
    pr.check("point_concentration", est.pointFraction >= kPointFractionFloor, est.pointFraction,
             kPointFractionFloor);
  }
  if (cfg.fields.preset == "axes-concentration") {
    pr.check("axes_concentration", est.axesFraction >= kAxesFractionFloor, est.axesFraction, kAxesFractionFloor);
  }
  if (densityApplies(cfg)) {
    const WristbandDensity dens(cfg.fields.alphaTop, cfg.fields.betaBottom, cfg.analysis.bScale);
    const double l1 = compareToDensity(est.histogram, dens).l1;
    pr.check("density_l1", l1 < 0.1, l1, 0.1);
  }
  if (!est.rates.empty()) {
    const double slope = logLogSlope(est.rates);
    pr.check("excursion_slope", slope >= -1.1 && slope <= -0.9, slope, 0.1);
    if (!est.ratesTop.empty() && cfg.fields.preset == "wristband-1d-spin" &&
        cfg.fields.alphaTop == cfg.fields.betaBottom) {
      const double worst = wallAsymmetry(est);
      pr.check("excursion_wall_symmetry", worst <= 0.05, worst, 0.05);
    }
  }
  if (!opt.quiet || !pr.allPass()) out << buf.str();
  return pr.allPass() ? kOk : kCheckFailed;
}

}  // namespace sbm::cli
