#include <benchmark/benchmark.h>

#include <numbers>

#include "sbm/density.hpp"
#include "sbm/histogram.hpp"
#include "sbm/integrator.hpp"

using namespace sbm;

namespace {

const Domain& band() {
  static const Domain d = Domain::wristband(2.0 * std::numbers::pi, 1.0);
  return d;
}

class Null : public StepObserver {
 public:
  void onStep(const StepRecord& rec) override { benchmark::DoNotOptimize(rec.L); }
};

void BM_ReflectedStepInterior(benchmark::State& state) {
  const FieldSet f = presets::wristbandOneDimSpin(band(), 1.0, 1.0, 1.0);
  const ReflectedState s{vec({1.0, 0.2}), vec({0.3}), 0.0};
  const Vec dB = vec({0.01, -0.01});
  for (auto _ : state) benchmark::DoNotOptimize(reflectedStep(s, dB, f, band()));
}
BENCHMARK(BM_ReflectedStepInterior);

void BM_ReflectedStepContact(benchmark::State& state) {
  const FieldSet f = presets::pointConcentration(band());
  const ReflectedState s{vec({1.0, 0.995}), vec({0.3, -0.1}), 0.0};
  const Vec dB = vec({0.01, 0.02});
  for (auto _ : state) benchmark::DoNotOptimize(reflectedStep(s, dB, f, band()));
}
BENCHMARK(BM_ReflectedStepContact);

// Steps per second of a full run; the argument is the spin dimension preset (1 or 2).
void BM_Simulate(benchmark::State& state) {
  const FieldSet f = state.range(0) == 1 ? presets::wristbandOneDimSpin(band(), 1.0, 1.0, 1.0)
                                         : presets::pointConcentration(band());
  SimConfig c;
  c.dt = 1e-4;
  c.horizon = 10.0;
  c.seed = 1;
  c.initialX = vec({0.0, 0.0});
  c.initialS = Vec::Zero(f.spinDim);
  std::int64_t steps = 0;
  for (auto _ : state) {
    Null obs;
    steps += simulate(c, band(), f, obs).steps;
  }
  state.SetItemsProcessed(steps);
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_HistogramAdd(benchmark::State& state) {
  OccupancyHistogram h({{"x2", -1.0, 1.0, 20}, {"s1", -1.0, 1.0, 20}});
  const Vec x = vec({0.0, 0.31});
  const Vec s = vec({-0.42});
  for (auto _ : state) h.add(x, s, 1e-4);
  benchmark::DoNotOptimize(h.totalWeight());
}
BENCHMARK(BM_HistogramAdd);

void BM_CellMasses(benchmark::State& state) {
  const WristbandDensity dens(2.0, 1.0);
  const OccupancyHistogram h({{"x2", -1.0, 1.0, 20}, {"s1", -1.0, 2.0, 20}});
  for (auto _ : state) benchmark::DoNotOptimize(dens.cellMasses(h));
}
BENCHMARK(BM_CellMasses);

}  // namespace
BENCHMARK_MAIN();
