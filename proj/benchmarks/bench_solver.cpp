#include <benchmark/benchmark.h>

#include "mpct/pendulum.hpp"

namespace {

using namespace mpct;

void BM_BuildOffline(benchmark::State& state) {
  const ValidatedProblem problem = pendulum::reference_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    OfflineData d = build_offline(problem);
    benchmark::DoNotOptimize(d.M2.data());
  }
}
BENCHMARK(BM_BuildOffline)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_WarmstartGain(benchmark::State& state) {
  const ValidatedProblem problem = pendulum::reference_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    WarmstartGain g = compute_warmstart_gain(problem);
    benchmark::DoNotOptimize(g.P_z2.data());
  }
}
BENCHMARK(BM_WarmstartGain)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

// Cold solve from the first closed-loop state (0, 0, 1).
void BM_ColdSolve(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const ValidatedProblem problem = pendulum::reference_problem(N);
  const OfflineData d = build_offline(problem);
  const SolverSettings settings{problem.config().epsilon, problem.config().max_iter};
  const VectorXd x = Eigen::Vector3d(0.0, 0.0, 1.0);
  const VectorXd r = VectorXd::Zero(4);
  int iterations = 0;
  for (auto _ : state) {
    SolveResult res = eadmm_solve(d, settings, x, r, cold_start(3, 1, N));
    iterations = res.iterations;
    benchmark::DoNotOptimize(res.u0.data());
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_ColdSolve)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_SingleIteration(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const ValidatedProblem problem = pendulum::reference_problem(N);
  const OfflineData d = build_offline(problem);
  const VectorXd x = Eigen::Vector3d(0.0, 0.0, 1.0);
  const VectorXd r = VectorXd::Zero(4);
  SolverState s = cold_start(3, 1, N);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eadmm_iteration(s, d, x, r));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SingleIteration)->Arg(5)->Arg(10)->Arg(20)->Arg(40);

}  // namespace
BENCHMARK_MAIN();
