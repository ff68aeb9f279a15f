// Serial reference vs OpenMP kernels. Compare the */serial and */parallel pairs;
// `cholesky` is the one-off factorization cost behind every PathSampler.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "helios/ensemble.hpp"
#include "helios/fbm.hpp"
#include "helios/inverse.hpp"
#include "helios/linalg.hpp"

using namespace helios;

namespace {

constexpr double pi = std::numbers::pi;

Matrix fbm_gram(std::size_t m) {
  return fbm::covariance_matrix(fbm::TimeGrid(1.0, m), fbm::HurstIndex(0.7));
}

forward::DiffusionProblem baseline_problem() {
  return {[](double t) { return t * t; }, [](double r) { return std::sin(3.0 * r); },
          [](double r) { return std::sin(2.0 * r); }, [](double) { return 1.0; }, pi, 1.0};
}

void BM_Cholesky(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix gram = fbm_gram(n);
  for (auto _ : state) {
    Matrix work = gram;
    const auto status = linalg::cholesky_inplace(work.data(), n);
    benchmark::DoNotOptimize(status);
  }
}

template <bool Parallel>
void BM_SamplePaths(benchmark::State& state) {
  const fbm::PathSampler sampler(fbm::TimeGrid(1.0, static_cast<std::size_t>(state.range(0))), fbm::HurstIndex(0.3));
  for (auto _ : state) {
    auto paths = Parallel ? fbm::sample_paths(sampler, 500, 1) : fbm::reference::sample_paths(sampler, 500, 1);
    benchmark::DoNotOptimize(paths.values().data().data());
  }
}

template <bool Parallel>
void BM_Ensemble(benchmark::State& state) {
  const fbm::PathSampler sampler(fbm::TimeGrid(1.0, 512), fbm::HurstIndex(0.5));
  const spectral::RadialGrid rgrid(pi, 100);
  const ensemble::EnsembleConfig cfg{static_cast<std::size_t>(state.range(0)), 30, ensemble::Solver::fd, {0.001, 1}, 1};
  for (auto _ : state) {
    auto stats = Parallel ? ensemble::run_ensemble(baseline_problem(), rgrid, sampler, cfg)
                          : ensemble::reference::run_ensemble(baseline_problem(), rgrid, sampler, cfg);
    benchmark::DoNotOptimize(stats.mean.data());
  }
}

template <bool Parallel>
void BM_KernelTable(benchmark::State& state) {
  const double hurst = static_cast<double>(state.range(0)) / 100.0;
  inverse::KernelConfig cfg;
  cfg.quad_steps = 2048;
  cfg.cells = 1024;
  cfg.mc_paths = 2000;
  cfg.mc_steps = 512;
  const auto kp = inverse::KernelProblem::from(baseline_problem());
  for (auto _ : state) {
    auto table = Parallel ? inverse::build_kernel_table(kp, fbm::HurstIndex(hurst), 30, cfg)
                          : inverse::reference::build_kernel_table(kp, fbm::HurstIndex(hurst), 30, cfg);
    benchmark::DoNotOptimize(table.noise.data().data());
  }
}

}  // namespace

BENCHMARK(BM_Cholesky)->Name("cholesky")->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SamplePaths<false>)->Name("sample_paths/serial")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SamplePaths<true>)->Name("sample_paths/parallel")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ensemble<false>)->Name("ensemble_fd/serial")->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ensemble<true>)->Name("ensemble_fd/parallel")->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelTable<false>)->Name("kernel_table/serial")->Arg(30)->Arg(70)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelTable<true>)->Name("kernel_table/parallel")->Arg(30)->Arg(70)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
