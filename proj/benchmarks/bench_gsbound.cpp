#include <benchmark/benchmark.h>

#include "gsbound/blockmat.hpp"
#include "gsbound/bounds.hpp"
#include "gsbound/kolmogorov.hpp"
#include "gsbound/model.hpp"
#include "gsbound/montecarlo.hpp"

using namespace gsbound;

namespace {

McConfig config(std::int64_t reps, bool aggregate) {
  McConfig c;
  c.replications = reps;
  c.seed = 42;
  c.workers = 1;
  c.aggregate = aggregate;
  return c;
}

void BM_EstimateMomentsExponential(benchmark::State& state) {
  const auto model = make_model("exponential");
  const auto design = equal_groups(1, state.range(0), 2);
  const auto cfg = config(10000, state.range(1) != 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_moments(*model, design, Vector::Ones(1), 0.5, cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.replications);
}
BENCHMARK(BM_EstimateMomentsExponential)->Args({200, 1})->Args({200, 0})->Args({2000, 1})->Unit(benchmark::kMillisecond);

void BM_EstimateMomentsLogistic(benchmark::State& state) {
  const auto model = make_model("logistic");
  const auto design = equal_groups(1, state.range(0), 2);
  const auto cfg = config(2000, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_moments(*model, design, Vector::Zero(1), 0.5, cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.replications);
}
BENCHMARK(BM_EstimateMomentsLogistic)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_HermiteSmoother(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hermite_smoother(m));
}
BENCHMARK(BM_HermiteSmoother)->DenseRange(1, 8, 1)->Unit(benchmark::kMillisecond);

void BM_EmpiricalKolmogorov(benchmark::State& state) {
  const auto p = static_cast<int>(state.range(0));
  const auto rows = state.range(1);
  Matrix x(rows, p);
  Rng rng(7, 0);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const auto mode = p <= 2 && rows <= 2000 ? KolMode::exact : KolMode::grid;
  for (auto _ : state) benchmark::DoNotOptimize(empirical_kolmogorov(x, {}, mode));
  state.SetLabel(mode == KolMode::exact ? "exact" : "grid");
}
BENCHMARK(BM_EmpiricalKolmogorov)
    ->Args({2, 500})
    ->Args({2, 2000})
    ->Args({2, 100000})
    ->Args({3, 100000})
    ->Unit(benchmark::kMillisecond);

void BM_BuildBlocks(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int kk = static_cast<int>(state.range(1));
  const auto design = equal_groups(d, 100L * kk, kk);
  Matrix b = Matrix::Random(d, d);
  const Matrix info = b * b.transpose() + Matrix::Identity(d, d);
  const auto set = info_from_per_observation(info, design);
  for (auto _ : state) benchmark::DoNotOptimize(build_blocks(set, design));
}
BENCHMARK(BM_BuildBlocks)->Args({1, 2})->Args({2, 4})->Args({3, 8})->Args({4, 16});

void BM_ClosedBoundAutoEpsilon(benchmark::State& state) {
  const auto design = equal_groups(1, state.range(0), 4);
  HNorms norms;
  norms.sup = norms.d1 = 1.0;
  norms.d2 = norms.d3 = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_epsilon(
        [&](double e) { return exponential_closed_bound(design, 1.0, e, norms).total; }, 1e-3, 0.999));
  }
}
BENCHMARK(BM_ClosedBoundAutoEpsilon)->Arg(400)->Arg(6400);

}  // namespace

BENCHMARK_MAIN();
