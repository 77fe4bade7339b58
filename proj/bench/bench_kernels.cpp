// Parallel kernels vs their serial reference implementations. Run with
// --benchmark_filter=knn to compare one family at a time.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "odstream/kernels.hpp"

namespace {

using odstream::kernels::AngleMoments;

std::vector<std::vector<double>> make_points(std::size_t n, std::size_t d) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    for (auto& p : pts) {
        for (auto& v : p) v = u(rng);
    }
    return pts;
}

void bm_knn_graph_parallel(benchmark::State& state) {
    const auto pts = make_points(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        auto graph = odstream::kernels::knn_graph(pts, 10);
        benchmark::DoNotOptimize(graph);
    }
}
BENCHMARK(bm_knn_graph_parallel)->Arg(256)->Arg(1024)->Arg(4096);

void bm_knn_graph_serial(benchmark::State& state) {
    const auto pts = make_points(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        auto graph = odstream::kernels::serial::knn_graph(pts, 10);
        benchmark::DoNotOptimize(graph);
    }
}
BENCHMARK(bm_knn_graph_serial)->Arg(256)->Arg(1024)->Arg(4096);

void bm_angle_moments_parallel(benchmark::State& state) {
    const auto pts = make_points(static_cast<std::size_t>(state.range(0)), 8);
    const std::vector<double> query(8, 0.25);
    for (auto _ : state) {
        AngleMoments m = odstream::kernels::angle_moments(pts, query);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(bm_angle_moments_parallel)->Arg(256)->Arg(1024)->Arg(4096);

void bm_angle_moments_serial(benchmark::State& state) {
    const auto pts = make_points(static_cast<std::size_t>(state.range(0)), 8);
    const std::vector<double> query(8, 0.25);
    for (auto _ : state) {
        AngleMoments m = odstream::kernels::serial::angle_moments(pts, query);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(bm_angle_moments_serial)->Arg(256)->Arg(1024)->Arg(4096);

void bm_percentile_parallel(benchmark::State& state) {
    const auto pts = make_points(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        double r = odstream::kernels::pairwise_distance_percentile(pts, 0.05);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(bm_percentile_parallel)->Arg(256)->Arg(1024)->Arg(2048);

void bm_percentile_serial(benchmark::State& state) {
    const auto pts = make_points(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        double r = odstream::kernels::serial::pairwise_distance_percentile(pts, 0.05);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(bm_percentile_serial)->Arg(256)->Arg(1024)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();
