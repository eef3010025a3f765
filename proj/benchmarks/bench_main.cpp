#include <benchmark/benchmark.h>

#include "chaoslab/kernels.hpp"
#include "chaoslab/particles.hpp"
#include "chaoslab/pde.hpp"

using namespace chaoslab;

namespace {

ParticleEnsemble gaussian_ensemble(std::size_t n) {
  InitialLaw law;
  law.component = DensitySpec::gaussian(0.0, 1.0);
  return sample_initial(law, n, 7);
}

void BM_ConvolvePairwise(benchmark::State& state, InteractionKernel kernel) {
  const auto e = gaussian_ensemble(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(e.size());
  for (auto _ : state) {
    empirical_convolve_all_pairwise(kernel, 0.0, e, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_ConvolveFast(benchmark::State& state, InteractionKernel kernel) {
  const auto e = gaussian_ensemble(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(e.size());
  for (auto _ : state) {
    empirical_convolve_all(kernel, 0.0, e, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_EmStep(benchmark::State& state) {
  const auto kernel = make_smooth_sin_kernel();
  const auto F = make_identity_drift();
  const auto e = gaussian_ensemble(static_cast<std::size_t>(state.range(0)));
  const BrownianDriver driver(1, 0, 1e-3);
  DriftField drift = [&](double t, const ParticleEnsemble& x, std::span<double> out) {
    assemble_drift_all(F, kernel, t, x, out);
  };
  const auto sigma = Diffusion::constant_value(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(em_step(e, drift, sigma, 1e-3, driver));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_NonlocalFpStep(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  const auto rho0 = DensitySpec::gaussian(0.0, 1.0).to_grid(-8.0, 8.0, cells);
  const auto kernel = make_smooth_sin_kernel();
  const auto F = make_identity_drift();
  PdeScheme s;
  s.horizon = 1.0;
  FokkerPlanck1D fp(rho0, constant_coefficient(0.5), s);
  const double t = fp.dt() * 10;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_nonlocal_fp(rho0, F, kernel, constant_coefficient(0.5), s, {t}));
  state.SetItemsProcessed(state.iterations() * 10 * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_ConvolvePairwise, rank, make_rank_kernel())->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK_CAPTURE(BM_ConvolveFast, rank, make_rank_kernel())->RangeMultiplier(4)->Range(64, 65536)->Complexity();
BENCHMARK_CAPTURE(BM_ConvolvePairwise, smooth_sin, make_smooth_sin_kernel())->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK_CAPTURE(BM_ConvolveFast, smooth_sin, make_smooth_sin_kernel())->RangeMultiplier(4)->Range(64, 65536)->Complexity();
BENCHMARK_CAPTURE(BM_ConvolvePairwise, box, make_mollified_kernel(make_box_mollifier(), 0.3))->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK_CAPTURE(BM_ConvolveFast, box, make_mollified_kernel(make_box_mollifier(), 0.3))->RangeMultiplier(4)->Range(64, 65536)->Complexity();
BENCHMARK(BM_EmStep)->RangeMultiplier(4)->Range(256, 16384);
BENCHMARK(BM_NonlocalFpStep)->RangeMultiplier(2)->Range(256, 2048);
BENCHMARK_MAIN();
