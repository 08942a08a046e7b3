// Serial reference kernels against their OpenMP / accelerated counterparts.
//
//   ./bench_kernels --benchmark_filter=Build
//
// Thread counts follow OMP_NUM_THREADS for the parallel variants.

#include <benchmark/benchmark.h>

#include "orcurv/curvature.hpp"
#include "orcurv/graph.hpp"
#include "orcurv/paths.hpp"
#include "orcurv/sampling.hpp"
#include "orcurv/transport.hpp"

using namespace orc;

namespace {

Surface surface_arg(int64_t k) { return Surface{static_cast<SurfaceKind>(k)}; }

std::vector<SurfacePoint> points(const Surface& s, std::size_t n) {
  return sample_points(s, {double(n), CountMode::FixedCount, 7});
}

double epsilon_for(std::size_t n) { return ScalingSchedule{0.16, 0.16, 1, 1, n}.epsilon(); }

void BM_BuildReference(benchmark::State& st) {
  const auto s = surface_arg(st.range(0));
  const auto n = static_cast<std::size_t>(st.range(1));
  const auto p = points(s, n);
  for (auto _ : st) {
    benchmark::DoNotOptimize(build_threshold_graph_reference(s, p, epsilon_for(n), WeightScheme::ManifoldDistance));
  }
}

void BM_BuildBruteForceParallel(benchmark::State& st) {
  const auto s = surface_arg(st.range(0));
  const auto n = static_cast<std::size_t>(st.range(1));
  const auto p = points(s, n);
  for (auto _ : st) {
    benchmark::DoNotOptimize(build_threshold_graph(s, p, epsilon_for(n), WeightScheme::ManifoldDistance,
                                                   {NeighborSearch::BruteForce, 0}));
  }
}

void BM_BuildCellGrid(benchmark::State& st) {
  const auto s = surface_arg(st.range(0));
  const auto n = static_cast<std::size_t>(st.range(1));
  const auto p = points(s, n);
  for (auto _ : st) {
    benchmark::DoNotOptimize(build_threshold_graph(s, p, epsilon_for(n), WeightScheme::ManifoldDistance,
                                                   {NeighborSearch::CellGrid, 0}));
  }
}

struct ProbeFixture {
  GeoGraph graph;
  Ball bx, by;
};

ProbeFixture probe_fixture(const Surface& s, std::size_t n) {
  const ScalingSchedule sch{0.16, 0.16, 1, 1, n};
  ProbeFixture f;
  f.graph = build_rgg(s, points(s, n), probe_pair(s, sch.delta()), sch.epsilon(), WeightScheme::ManifoldDistance);
  f.bx = ball(f.graph, f.graph.probe_x(), sch.delta());
  f.by = ball(f.graph, f.graph.probe_y(), sch.delta());
  return f;
}

void BM_MatrixReference(benchmark::State& st) {
  const auto f = probe_fixture(surface_arg(st.range(0)), st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(distance_matrix_reference(f.graph, f.bx, f.by));
}

void BM_MatrixDijkstraParallel(benchmark::State& st) {
  const auto f = probe_fixture(surface_arg(st.range(0)), st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(distance_matrix(f.graph, f.bx, f.by, {SearchMethod::Dijkstra, 0}));
}

void BM_MatrixAStarParallel(benchmark::State& st) {
  const auto f = probe_fixture(surface_arg(st.range(0)), st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(distance_matrix(f.graph, f.bx, f.by, {SearchMethod::AStar, 0}));
}

void BM_BallTransport(benchmark::State& st) {
  const auto f = probe_fixture(surface_arg(st.range(0)), st.range(1));
  const auto dm = distance_matrix(f.graph, f.bx, f.by);
  for (auto _ : st) benchmark::DoNotOptimize(wasserstein_between_balls(f.bx, f.by, dm));
  st.counters["balls"] = double(f.bx.size() * f.by.size());
}

// (surface: 0 torus, 1 sphere, 2 bolza) x n
void Sizes(benchmark::internal::Benchmark* b) {
  for (int s = 0; s < 3; ++s)
    for (int n : {1 << 11, 1 << 13}) b->Args({s, n});
}

}  // namespace

BENCHMARK(BM_BuildReference)->Apply(Sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildBruteForceParallel)->Apply(Sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildCellGrid)->Apply(Sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatrixReference)->Apply(Sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatrixDijkstraParallel)->Apply(Sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatrixAStarParallel)->Apply(Sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BallTransport)->Apply(Sizes)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
