#include <benchmark/benchmark.h>

#include <random>

#include "calnet/kernels.hpp"
#include "calnet/network.hpp"

using namespace calnet;

namespace {

std::vector<kernels::TaggedSegment> honeycomb_segments(int budget) {
  const auto net = generate_honeycomb_network(7, budget);
  std::vector<kernels::TaggedSegment> segs;
  for (const auto& e : net.edges) segs.push_back({{net.vertices[e.from].p, net.vertices[e.to].p}, e.from, e.to});
  return segs;
}

std::vector<Ring<double>> square_grid(int n) {
  std::vector<Ring<double>> cells;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cells.push_back({{double(i), double(j)}, {i + 1.0, double(j)}, {i + 1.0, j + 1.0}, {double(i), j + 1.0}});
  return cells;
}

std::vector<Point2> terminals(std::size_t n) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Point2> t;
  for (std::size_t k = 0; k < n; ++k) t.push_back({u(rng), u(rng)});
  return t;
}

void BM_ComassSerial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(kernels::comass_scan_serial(s.range(0)));
}
void BM_ComassParallel(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(kernels::comass_scan(s.range(0)));
}
BENCHMARK(BM_ComassSerial)->Arg(1 << 20);
BENCHMARK(BM_ComassParallel)->Arg(1 << 20);

void BM_ConflictsSerial(benchmark::State& s) {
  const auto segs = honeycomb_segments(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::segment_conflicts_serial(segs, 1e-9));
}
void BM_ConflictsParallel(benchmark::State& s) {
  const auto segs = honeycomb_segments(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::segment_conflicts(segs, 1e-9));
}
BENCHMARK(BM_ConflictsSerial)->Arg(20)->Arg(400);
BENCHMARK(BM_ConflictsParallel)->Arg(20)->Arg(400);

void BM_OverlapsSerial(benchmark::State& s) {
  const auto cells = square_grid(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::cell_overlaps_serial(cells, 1e-9));
}
void BM_OverlapsParallel(benchmark::State& s) {
  const auto cells = square_grid(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::cell_overlaps(cells, 1e-9));
}
BENCHMARK(BM_OverlapsSerial)->Arg(16)->Arg(40);
BENCHMARK(BM_OverlapsParallel)->Arg(16)->Arg(40);

void BM_SteinerSerial(benchmark::State& s) {
  const auto t = terminals(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::steiner_search_serial(t));
}
void BM_SteinerParallel(benchmark::State& s) {
  const auto t = terminals(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::steiner_search(t));
}
BENCHMARK(BM_SteinerSerial)->Arg(5);
BENCHMARK(BM_SteinerParallel)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
