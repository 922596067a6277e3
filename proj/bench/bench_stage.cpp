// Throughput of the fused stage-objective kernel against the naive serial
// transcription, and OpenMP scaling of the kernel itself.
//
//   ./bench_stage                      # all benchmarks
//   ./bench_stage --benchmark_filter=Kernel

#include <benchmark/benchmark.h>

#include "tcmv/reference.hpp"
#include "tcmv/scenario.hpp"
#include "tcmv/stage.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace tcmv;

namespace {

MarketSpec bench_market() {
  MarketSpec spec;
  spec.horizon = 1;
  spec.assets = 3;
  spec.riskfree = Eigen::VectorXd::Constant(1, 1.05);
  MomentSpec m;
  m.mean = Eigen::Vector3d(0.14, 0.16, 0.17);
  m.stddev = Eigen::Vector3d(0.185, 0.30, 0.24);
  m.corr.resize(3, 3);
  m.corr << 1.0, 0.64, 0.79,
      0.64, 1.0, 0.75,
      0.79, 0.75, 1.0;
  spec.returns = m;
  return spec;
}

const ScenarioSet& scenarios(long n) {
  static std::map<long, ScenarioSet> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, generate_scenarios(bench_market(), n, 1)).first;
  return it->second;
}

const Eigen::Vector3d kFund(0.63, -0.08, 0.72);
const NextCoeffs kNext{0.25, -0.28, 0.19, 0.20};

void ReferenceEval(benchmark::State& state) {
  const ScenarioSet& sc = scenarios(state.range(0));
  for (auto _ : state) {
    const double f = reference::eval_F_plus(kFund, sc.excess(0), 1.05, 1.0, 1.0, kNext);
    benchmark::DoNotOptimize(f);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void KernelEval(benchmark::State& state) {
  const ScenarioSet& sc = scenarios(state.range(0));
  const MarketSpec spec = bench_market();
  const DiscountCurve curve = discount_curve(spec.riskfree);
  const StageContext ctx = StageContext::at(sc, spec.riskfree, curve, 0);
  for (auto _ : state) {
    const double f = eval_stage_objective(ctx, Side::plus, 1.0, kNext, kFund);
    benchmark::DoNotOptimize(f);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void KernelEvalSerial(benchmark::State& state) {
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  KernelEval(state);
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif
}

}  // namespace

BENCHMARK(ReferenceEval)->Arg(20000)->Arg(200000)->Unit(benchmark::kMicrosecond);
BENCHMARK(KernelEvalSerial)->Arg(20000)->Arg(200000)->Unit(benchmark::kMicrosecond);
BENCHMARK(KernelEval)->Arg(20000)->Arg(200000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
