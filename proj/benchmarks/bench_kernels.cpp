// Serial reference vs OpenMP assembly of the Galerkin integrals, and one coupled run per policy.
#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "congesta/simulation.hpp"

using namespace congesta;

namespace {

std::string config_2d(int N, int n) {
  return "[domain]\ndim = 2\n[boundary]\nU0 = 0.3, 0.1\nA = 0.2, 0.1, 0, 0.1\nrho_B = 0.7\n"
         "[initial]\nrho = cosine\nrho_mean = 0.6\nrho_amp = 0.2\nvelocity = boundary\n"
         "[potential]\nmu0 = 1\nmu1 = 0.01\neta0 = 0.3\neta1 = 0.01\nq = 1.5\ndelta = 1e-2\n"
         "[scheme]\nresolution = " + std::to_string(N) + "\nmodes = " + std::to_string(n) +
         "\ndt = 2e-3\nT = 0.01\neps = 0.02\n[congestion]\nalpha = 10\n";
}

void BM_Assemble(benchmark::State& state, ExecPolicy policy) {
  const int N = static_cast<int>(state.range(0)), n = static_cast<int>(state.range(1));
  Simulation sim(parse_run_config_text(config_2d(N, n), "bench.cfg"), policy);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.3, 0.9);
  std::vector<double> r0(sim.mesh().num_cells()), r1(sim.mesh().num_cells());
  for (auto& r : r0) r = u(rng);
  for (auto& r : r1) r = u(rng);
  const Eigen::VectorXd v0 = Eigen::VectorXd::Random(n) * 0.2, v1 = Eigen::VectorXd::Random(n) * 0.2;
  std::vector<PointState> pts;
  sim.momentum().sample(r0, v0, r1, v1, pts);
  Assembly out;
  for (auto _ : state) {
    assemble(sim.basis(), pts, sim.potential(), true, policy, out);
    benchmark::DoNotOptimize(out.stiffness.data());
  }
  state.counters["points"] = static_cast<double>(pts.size());
  state.counters["threads"] = policy == ExecPolicy::kParallel ? kernel_threads() : 1;
}

void BM_Run(benchmark::State& state, ExecPolicy policy) {
  const RunConfig cfg = parse_run_config_text(config_2d(16, 8), "bench.cfg");
  for (auto _ : state) {
    Simulation sim(cfg, policy);
    const RunRecord rec = sim.run();
    benchmark::DoNotOptimize(rec.steps);
  }
  state.counters["threads"] = policy == ExecPolicy::kParallel ? kernel_threads() : 1;
}

}  // namespace

BENCHMARK_CAPTURE(BM_Assemble, serial, ExecPolicy::kSerial)->Args({16, 8})->Args({32, 16})->Args({64, 16})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Assemble, parallel, ExecPolicy::kParallel)->Args({16, 8})->Args({32, 16})->Args({64, 16})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Run, serial, ExecPolicy::kSerial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Run, parallel, ExecPolicy::kParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
