// Micro benchmarks for the hot paths: weight evaluation, spline nuisance
// fitting, path integration, fold targeting, and the full cross-fitted
// pipeline. Sizes mirror the simulation lab so the numbers predict wall
// time per Monte Carlo replication.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <vector>

#include "wate/crossfit.hpp"
#include "wate/diagnostics.hpp"
#include "wate/model.hpp"
#include "wate/path.hpp"
#include "wate/simlab.hpp"
#include "wate/splines.hpp"
#include "wate/targeting.hpp"
#include "wate/weights.hpp"

namespace {

const wate::WeightSpec& weight_by_index(std::int64_t i) {
  static const std::vector<wate::WeightSpec> all{
      wate::WeightSpec::ate(), wate::WeightSpec::ato(),
      wate::WeightSpec::aten(), wate::WeightSpec::atb(1.5, 2.5),
      wate::WeightSpec::smooth_trim(0.1, 0.05)};
  return all[static_cast<std::size_t>(i)];
}

wate::NuisanceValues truth_values(std::size_t n, std::uint64_t seed) {
  const wate::DgpSpec dgp = wate::dgp_smooth_heterogeneous();
  const wate::Dataset data = wate::generate(dgp, n, seed);
  return wate::evaluate(wate::DgpNuisanceModel(dgp), data);
}

void BM_LambdaEval(benchmark::State& state) {
  const wate::WeightSpec& w = weight_by_index(state.range(0));
  double acc = 0.0;
  int order = 0;
  for (auto _ : state) {
    for (int k = 1; k < 1024; ++k) {
      acc += wate::lambda_eval(w, k / 1024.0, order);
      order = (order + 1) & 3;
    }
  }
  benchmark::DoNotOptimize(acc);
  state.SetItemsProcessed(state.iterations() * 1023);
  state.SetLabel(w.name());
}
BENCHMARK(BM_LambdaEval)->DenseRange(0, 4)->Unit(benchmark::kMicrosecond);

void BM_SplineFit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const wate::Dataset data =
      wate::generate(wate::dgp_smooth_heterogeneous(), n, 99);
  for (auto _ : state) {
    auto fit = wate::fit_nuisances(data, 3, 0.04, 2.0);
    benchmark::DoNotOptimize(fit);
  }
}
BENCHMARK(BM_SplineFit)->Arg(250)->Arg(1000)->Arg(4000)
    ->Unit(benchmark::kMillisecond);

void BM_IntegratePath(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const wate::NuisanceValues u0 = truth_values(m, 7);
  const wate::PathConfig cfg = wate::PathConfig::practical(1e-3);
  for (auto _ : state) {
    const wate::PathState s =
        wate::integrate_path(u0, wate::WeightSpec::ato(), 0.25, cfg);
    benchmark::DoNotOptimize(s.psi_t);
  }
}
BENCHMARK(BM_IntegratePath)->Arg(128)->Arg(512)->Arg(2048)
    ->Unit(benchmark::kMillisecond);

void BM_TargetedFoldFit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const wate::DgpSpec dgp = wate::dgp_smooth_heterogeneous();
  const wate::Dataset fold = wate::generate(dgp, n, 13);
  const wate::NuisanceValues u0 =
      wate::evaluate(wate::DgpNuisanceModel(dgp), fold);
  const wate::WeightSpec w = wate::WeightSpec::ato();
  wate::TargetConfig tc;
  tc.mode = wate::TargetMode::practical;
  tc.c = wate::frak_c(wate::lambda_bounds(w, dgp.eta_star));
  tc.c_init = std::max(wate::c_init_hat(u0, w), 1e-12);
  tc.path = wate::PathConfig::practical(1e-3);
  for (auto _ : state) {
    const wate::FoldFit ff = wate::targeted_fold_fit(fold, u0, w, tc);
    benchmark::DoNotOptimize(ff.psi_k);
  }
}
BENCHMARK(BM_TargetedFoldFit)->Arg(250)->Arg(1000)
    ->Unit(benchmark::kMillisecond);

void BM_CrossFitEstimate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const wate::Dataset data =
      wate::generate(wate::dgp_smooth_heterogeneous(), n, 21);
  const wate::NuisanceFitter fitter = [](const wate::Dataset& train) {
    return wate::fit_nuisances(train, 3, 0.04, 2.0);
  };
  wate::CrossfitConfig cfg;
  cfg.seed = 5;
  cfg.eta = 0.01;
  for (auto _ : state) {
    const wate::Estimate est =
        wate::cross_fit_estimate(data, wate::WeightSpec::ato(), fitter, cfg);
    benchmark::DoNotOptimize(est.psi_cf);
  }
}
BENCHMARK(BM_CrossFitEstimate)->Arg(500)->Arg(2000)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
