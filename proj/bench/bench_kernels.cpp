// Serial reference loops against the OpenMP versions of the same work.
// e.g. bpkpz_bench --benchmark_filter=Mc

#include <benchmark/benchmark.h>

#include <bpkpz/fredholm.hpp>
#include <bpkpz/kernels.hpp>
#include <bpkpz/parallel.hpp>
#include <bpkpz/polymer.hpp>
#include <numbers>

using namespace bpkpz;

namespace {

std::vector<double> halfline_nodes(int n) { return halfline_rule(0.0, n).nodes; }

std::vector<cplx> wedge_nodes(const ComplexPath& path, int order) {
  DiscretizeOptions o;
  o.order = order;
  o.truncation_radius = 8.0;
  return discretize(path, o).nodes;
}

void BpMatrix(benchmark::State& state, bool parallel) {
  const auto k = DoubleContourKernel::borodin_peche({{-1.0}, {1.0}});
  const auto x = halfline_nodes(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    CMatrix m = parallel ? k.matrix(x, x) : k.matrix_serial(x, x);
    benchmark::DoNotOptimize(m.data());
  }
}

void TildeMatrix(benchmark::State& state, bool parallel) {
  const TildeKBPKernel k(0.0, {{-1.0}, {1.0}});
  const auto w = wedge_nodes(k.contours().cw, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    CMatrix m = parallel ? k.matrix(w) : k.matrix_serial(w);
    benchmark::DoNotOptimize(m.data());
  }
}

void KnMatrix(benchmark::State& state, bool parallel) {
  const KNKernel k(1000, 0.0, scaling_constants(1.0), {{-1.0}, {1.0}});
  const auto w = wedge_nodes(k.contours().cw, 8);
  for (auto _ : state) {
    CMatrix m = parallel ? k.matrix(w) : k.matrix_serial(w);
    benchmark::DoNotOptimize(m.data());
  }
}

void KuMatrix(benchmark::State& state, bool parallel) {
  FiniteNParams p;
  p.N = 9;
  p.tau = 9.0;
  p.a.assign(9, 0.0);
  p.alpha = {scaling_constants(1.0).theta + 0.5};
  p.u = 1.0;
  const KuKernel k(p);
  auto w = wedge_nodes(k.wedge().path, 4);
  w.resize(std::min<std::size_t>(w.size(), 64));
  for (auto _ : state) {
    CMatrix m = parallel ? k.matrix(w) : k.matrix_serial(w);
    benchmark::DoNotOptimize(m.data());
  }
}

void McFreeEnergies(benchmark::State& state, bool parallel) {
  SimConfig cfg = SimConfig::scaling(1.0, static_cast<int>(state.range(0)), {});
  cfg.seed = 1;
  for (auto _ : state) {
    auto F = mc_free_energies(cfg, 32, 0, parallel);
    benchmark::DoNotOptimize(F.data());
  }
  state.SetItemsProcessed(state.iterations() * 32);
}

}  // namespace

BENCHMARK_CAPTURE(BpMatrix, serial, false)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BpMatrix, omp, true)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(TildeMatrix, serial, false)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(TildeMatrix, omp, true)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(KnMatrix, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(KnMatrix, omp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(KuMatrix, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(KuMatrix, omp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(McFreeEnergies, serial, false)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(McFreeEnergies, omp, true)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
