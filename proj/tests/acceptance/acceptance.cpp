// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "commands.hpp"
#include "config.hpp"
#include "oracles.hpp"
#include "sbm/csv.hpp"
#include "sbm/density.hpp"
#include "sbm/diagnostics.hpp"
#include "sbm/skorokhod.hpp"

using namespace sbm;
using namespace sbm::cli;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;
std::map<int, std::string> lines;  // printed in criterion order at the end

void report(int id, bool pass, const std::string& what) {
  std::ostringstream line;
  line << "CRITERION " << id << ' ' << (pass ? "PASS" : "FAIL") << ' ' << what;
  std::cout << "# " << line.str() << std::endl;
  lines[id] = line.str();
  if (!pass) ++failures;
}

double seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

std::string num(double v) { return formatReal(v); }

RunConfig shipped(const std::string& name) { return loadConfig(std::string(SBM_CONFIG_DIR) + "/" + name); }

// ---- criterion 4 -------------------------------------------------------------

FieldSet threeDimFields(const Domain& d) {
  // Top wall g = (cos x, sin x, 1)/2, bottom wall g = (0, 0, -1)/2.
  return wristbandFields(d, parseFourier("0, 0.5, 0; 0, 0, 0.5; 0.5", 3), parseFourier("0; 0; -0.5", 3), 1.0,
                         TauProfile::zero(), TauProfile::zero(), "spin-3");
}

void criterionSpbv() {
  const Domain d = Domain::wristband(2.0 * std::numbers::pi, 1.0);
  const FieldSet fields[] = {presets::wristbandOneDimSpin(d, 1.0, 1.0, 1.0), presets::pointConcentration(d),
                             threeDimFields(d)};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worstS = 0.0, worstX = 0.0;
  int done = 0;
  const auto start = Clock::now();
  for (int p = 1; p <= 3; ++p) {
    const FieldSet& f = fields[p - 1];
    const auto anchors = findAnchors(f, d);
    if (!anchors) {
      report(4, false, "no anchor set found for p = " + std::to_string(p));
      return;
    }
    const int count = p == 1 ? 34 : 33;
    for (int k = 0; k < count; ++k, ++done) {
      const Vec x0 = vec({2.0 * std::numbers::pi * u(rng), 1.8 * u(rng) - 0.9});
      const Vec z = vec({2.0 * std::numbers::pi * u(rng), 1.8 * u(rng) - 0.9});
      Vec s0(p);
      for (int i = 0; i < p; ++i) s0[i] = 2.0 * u(rng) - 1.0;
      const double T = 0.5 + 4.5 * u(rng);
      const BVDriver drv = constructSPbvDriver(d, f, *anchors, x0, s0, z, T);
      const PathPoint end = solveDeterministic(drv, d, f, x0, s0).final();
      worstS = std::max(worstS, end.s.norm());
      worstX = std::max(worstX, d.distance(end.x, z));
    }
  }
  const double t = seconds(start);
  report(4, worstS < 1e-9 && worstX < 1e-9 && t < 1.0,
         "spbv instances=" + std::to_string(done) + " max|s(T)|=" + num(worstS) + " max|x(T)-z|=" + num(worstX) +
             " seconds=" + num(t) + " (tol 1e-9, 1e-9, 1 s)");
}

// ---- criterion 5 -------------------------------------------------------------

void criterionJacobian() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int p = 2; p <= 3; ++p) {
    std::vector<double> alphas;
    std::vector<Vec> gs;
    for (int j = 0; j < p; ++j) {
      alphas.push_back(0.5 + 1.5 * u(rng));
      Vec g = Vec::Zero(p);
      for (int i = 0; i < p; ++i) g[i] = (i == j ? 1.0 : 0.0) + 0.5 * (2.0 * u(rng) - 1.0);
      gs.push_back(g);
    }
    std::vector<Vec> ts;
    for (int k = 0; k < 50; ++k) {
      Vec t(p);
      for (int i = 0; i < p; ++i) t[i] = 0.01 + 1.99 * u(rng);
      ts.push_back(t);
    }
    worst = std::max(worst, jacobianCheck(alphas, gs, ts));
  }
  report(5, worst < 1e-5, "jacobian max_rel_err=" + num(worst) + " over p=2,3 x 50 points (tol 1e-5)");
}

// ---- criterion 6 -------------------------------------------------------------

void criterionIdentities() {
  const std::pair<double, double> pairs[] = {{1.0, 1.0}, {2.0, 1.0}, {0.5, 1.5}};
  bool pass = true;
  double worst = 0.0;
  for (const auto& [al, be] : pairs) {
    const WristbandDensity dens(al, be);
    const double margin = 0.01 * (al + be);
    std::vector<double> grid;
    for (int i = 0; i < 1000; ++i) grid.push_back(-be + margin + (al + be - 2.0 * margin) * i / 999.0);
    const auto rep = verifyDensityIdentities(dens, grid);
    pass = pass && rep.passed() && rep.families.size() == 3;
    for (const auto& f : rep.families) worst = std::max(worst, f.worstError);
  }
  report(6, pass && worst <= 1e-8, "density identities worst_err=" + num(worst) + " 3 pairs x 1000 points (tol 1e-8)");
}

// ---- criterion 9 -------------------------------------------------------------

int runCli(const std::string& args, const std::string& workers) {
  const std::string cmd = "SBM_WORKERS=" + workers + " \"" SBM_EXE "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterionDeterminism() {
  const fs::path dir = fs::temp_directory_path() / ("sbm_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "run.ini";
  std::ofstream(cfg) << "[fields]\npreset = point-concentration\n[sim]\ndt = 1e-3\nhorizon = 20\nseed = 9\n"
                        "chains = 4\n[analysis]\nhistogram = s1:-1:1:40, s2:-1:1:40\n";
  struct Run {
    std::string name, workers;
  };
  const Run runs[] = {{"a", "1"}, {"b", "1"}, {"c", "3"}};
  bool ok = true;
  for (const auto& r : runs) {
    ok = ok && runCli("simulate --quiet --config " + cfg.string() + " --out-dir " + (dir / r.name).string(),
                      r.workers) == 0;
    ok = ok && runCli("estimate-stationary --quiet --config " + cfg.string() + " --out-dir " +
                          (dir / (r.name + "_est")).string(),
                      r.workers) == 0;
  }
  std::size_t compared = 0;
  if (ok) {
    for (const auto& r : {std::string("b"), std::string("c")}) {
      for (int i = 0; i < 4; ++i) {
        const std::string f = "trajectory_chain" + std::to_string(i) + ".csv";
        ok = ok && oracle::slurp((dir / "a" / f).string()) == oracle::slurp((dir / r / f).string());
        ++compared;
      }
      ok = ok && oracle::slurp((dir / "a_est" / "histogram.csv").string()) ==
                     oracle::slurp((dir / (r + "_est") / "histogram.csv").string());
      ++compared;
    }
  }
  fs::remove_all(dir);
  report(9, ok && compared == 10,
         "byte-identical files=" + std::to_string(compared) + " across repeats and SBM_WORKERS=1,3");
}

// ---- stationary runs -----------------------------------------------------------

struct Stationary {
  std::string label;
  StationaryEstimate est;
  double seconds;
};

Stationary runStationary(const std::string& label, const RunConfig& cfg) {
  const auto start = Clock::now();
  StationaryEstimate est = estimateStationary(cfg, workersFromEnvironment());
  const double t = seconds(start);
  std::cout << "# run " << label << ": dt " << num(cfg.sim.dt) << " horizon " << num(cfg.sim.horizon) << " x "
            << cfg.sim.chains << " chains, seed " << cfg.sim.seed << ", " << num(t) << " s" << std::endl;
  return {label, std::move(est), t};
}

}  // namespace

int main() {
  const auto start = Clock::now();

  criterionSpbv();
  criterionJacobian();
  criterionIdentities();
  criterionDeterminism();

  // A: reference step, Brownian increments drawn as sums of two half-step draws so that
  // B (half step, same seed) sees the same Brownian path. C: disjoint seeds.
  RunConfig a = shipped("wristband-1d-spin.ini");
  a.sim.brownianSubsteps = 2;
  RunConfig b = shipped("wristband-1d-spin.ini");
  b.sim.dt = a.sim.dt / 2.0;
  RunConfig c = shipped("wristband-1d-spin.ini");
  c.sim.seed = a.sim.seed + 100;
  const RunConfig point = shipped("point-concentration.ini");
  const RunConfig axes = shipped("axes-concentration.ini");

  std::vector<Stationary> runs;
  runs.push_back(runStationary("A", a));
  runs.push_back(runStationary("B", b));
  runs.push_back(runStationary("C", c));
  runs.push_back(runStationary("point", point));
  runs.push_back(runStationary("axes", axes));
  const auto& ra = runs[0].est;
  const auto& rb = runs[1].est;
  const auto& rc = runs[2].est;
  const auto& rp = runs[3].est;
  const auto& rx = runs[4].est;

  const WristbandDensity dens(1.0, 1.0);
  const double l1a = compareToDensity(ra.histogram, dens).l1;
  const double l1b = compareToDensity(rb.histogram, dens).l1;
  report(1, l1a < 0.1 && l1b < l1a,
         "density l1(dt)=" + num(l1a) + " l1(dt/2)=" + num(l1b) + " (tol 0.1, must decrease)");

  std::int64_t violations = 0;
  double worstExcess = -1e300;
  for (const auto& r : runs) {
    violations += r.est.dampingViolations;
    worstExcess = std::max(worstExcess, r.est.dampingWorstExcess);
  }
  report(2, violations == 0,
         "damping violations=" + std::to_string(violations) + " worst_excess=" + num(worstExcess) + " (tol 1e-9)");

  report(3, rp.hullFraction >= 0.99 && rx.hullFraction >= 0.99,
         "hull fraction point=" + num(rp.hullFraction) + " axes=" + num(rx.hullFraction) + " (min 0.99)");

  const double slope = logLogSlope(ra.rates);
  const double asym = wallAsymmetry(ra);
  report(7, slope >= -1.1 && slope <= -0.9 && asym <= 0.05,
         "excursion slope=" + num(slope) + " wall_asymmetry=" + num(asym) + " (band [-1.1, -0.9], max 0.05)");

  report(8, rp.pointFraction >= kPointFractionFloor && rx.axesFraction >= kAxesFractionFloor,
         "concentration point=" + num(rp.pointFraction) + " (min " + num(kPointFractionFloor) +
             ") axes=" + num(rx.axesFraction) + " (min " + num(kAxesFractionFloor) + ")");

  const double l1ac = l1Distance(ra.histogram, rc.histogram, singularCornerCells(ra.histogram, dens));
  report(10, l1ac < 0.05, "self-consistency l1=" + num(l1ac) + " (tol 0.05)");

  for (const auto& [id, line] : lines) std::cout << line << '\n';
  std::cout << "# total " << num(seconds(start)) << " s, " << failures << " failing" << std::endl;
  return failures;
}
