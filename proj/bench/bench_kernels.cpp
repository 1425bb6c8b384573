// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "lgi/lg_protocol.hpp"
#include "lgi/noise.hpp"
#include "lgi/nv_sim.hpp"

using namespace lgi;

namespace {

std::vector<double> theta_grid(int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[i] = kPi * i / (n - 1);
  return xs;
}

void BM_K3GridSerial(benchmark::State& state) {
  const auto s = standard_qutrit_scheme(UpdateRule::VonNeumann);
  const auto xs = theta_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(k3_on_grid_serial(s, xs));
}

void BM_K3GridParallel(benchmark::State& state) {
  const auto s = standard_qutrit_scheme(UpdateRule::VonNeumann);
  const auto xs = theta_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(k3_on_grid(s, xs));
}

nv::InrmExperimentSpec ensemble_spec(int samples) {
  nv::InrmExperimentSpec spec;
  spec.theta = 0.416 * kPi;
  spec.cg_variant = 1;
  spec.imperfections = ImperfectionModel::nominal();
  spec.imperfections.n_samples = samples;
  spec.options.cg = nv::CgModel::SquarePulse;
  return spec;
}

void BM_EnsembleSerial(benchmark::State& state) {
  const auto spec = ensemble_spec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nv::run_inrm_experiment_serial(spec));
}

void BM_EnsembleParallel(benchmark::State& state) {
  const auto spec = ensemble_spec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nv::run_inrm_experiment(spec));
}

void BM_DephasingSerial(benchmark::State& state) {
  ImperfectionModel m;
  m.n_samples = static_cast<int>(state.range(0));
  const auto samples = sample_detunings(m);
  const auto rho = imperfect_initial_state(m);
  const ComplexMatrix h = ComplexMatrix::Zero(6, 6);
  for (auto _ : state) benchmark::DoNotOptimize(dephasing_evolution_serial(rho, h, 30e-6, samples));
}

void BM_DephasingParallel(benchmark::State& state) {
  ImperfectionModel m;
  m.n_samples = static_cast<int>(state.range(0));
  const auto samples = sample_detunings(m);
  const auto rho = imperfect_initial_state(m);
  const ComplexMatrix h = ComplexMatrix::Zero(6, 6);
  for (auto _ : state) benchmark::DoNotOptimize(dephasing_evolution(rho, h, 30e-6, samples));
}

}  // namespace

BENCHMARK(BM_K3GridSerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_K3GridParallel)->Arg(1000)->Arg(10000);
BENCHMARK(BM_EnsembleSerial)->Arg(21)->Arg(201);
BENCHMARK(BM_EnsembleParallel)->Arg(21)->Arg(201);
BENCHMARK(BM_DephasingSerial)->Arg(41)->Arg(401);
BENCHMARK(BM_DephasingParallel)->Arg(41)->Arg(401);

BENCHMARK_MAIN();
