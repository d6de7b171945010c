#include <benchmark/benchmark.h>

#include "rfix/lmi.hpp"
#include "rfix/sdp.hpp"
#include "rfix/synth.hpp"

namespace {

using namespace rfix;

SynthesisSpec benchmark_spec() {
  SynthesisSpec spec;
  spec.plant = IntervalPlant::from_bounds({{0.5, 1.0}, {-1.0, 1.0}},
                                          {{0.5, 1.0}, {1.0, 1.5}});
  spec.m = 2;
  spec.dc = Polynomial({1.0, 4.5, 6.225, 4.525, 1.5});
  spec.sensitivity = PerfSpec{db_to_linear(-3.0), table1_psi(RangeKind::Middle, 0.01, 0.1)};
  spec.comp_sensitivity =
      PerfSpec{db_to_linear(-3.0), table1_psi(RangeKind::Middle, 50.0, 100.0)};
  spec.pins = Controller::make(2);
  spec.pins.pin_x(2, 0.0);
  return spec;
}

Controller reference_controller() {
  Controller c = Controller::make(2);
  c.x = {1.0, 0.8213, 0.0};
  c.y = {20.0270, 18.3422, 18.4318};
  return c;
}

void BM_AssembleJoint(benchmark::State& state) {
  SynthesisSpec spec = benchmark_spec();
  Controller ctrl = reference_controller();
  for (auto _ : state) {
    AssembledProblem ap = assemble_problem(spec, ctrl, false, true, true, true);
    benchmark::DoNotOptimize(ap.sdp.lmis.back().constant);
  }
}
BENCHMARK(BM_AssembleJoint);

void BM_AuditSolve(benchmark::State& state) {
  SynthesisSpec spec = benchmark_spec();
  Controller ctrl = reference_controller();
  for (auto _ : state) {
    SynthesisResult res = check_controller(spec, ctrl);
    benchmark::DoNotOptimize(res.outcome.achieved_margin);
  }
}
BENCHMARK(BM_AuditSolve)->Unit(benchmark::kMillisecond);

void BM_Synthesize(benchmark::State& state) {
  SynthesisSpec spec = benchmark_spec();
  for (auto _ : state) {
    SynthesisResult res = synthesize(spec);
    benchmark::DoNotOptimize(res.controller.y);
  }
}
BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
