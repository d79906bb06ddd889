// Microbenchmarks for the hot paths: viewshed computation, spatial index
// queries, kernel evaluation, network traversal, and mobility sampling.

#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "lpsim/behaviors.hpp"
#include "lpsim/gp.hpp"
#include "lpsim/path_graph.hpp"
#include "lpsim/raster.hpp"
#include "lpsim/rng.hpp"
#include "lpsim/sampling.hpp"
#include "lpsim/viewshed.hpp"

namespace {

lpsim::RasterGrid rough_dem(int n) {
  lpsim::RngStream rng(1);
  lpsim::RasterGrid dem = lpsim::RasterGrid::filled(n, n, 5.0, {0, 0}, 0.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double x = c * 5.0, y = r * 5.0;
      dem.at({c, r}) = 25.0 * std::sin(x / 37.0) * std::cos(y / 23.0) + rng.uniform(-2.0, 2.0);
    }
  }
  return dem;
}

// Square lattice road network: (n+1)^2 nodes, 2n(n+1) edges, 100 m spacing.
lpsim::PathGraph lattice_graph(int n) {
  lpsim::PathGraph g;
  std::vector<int> ids;
  for (int r = 0; r <= n; ++r) {
    for (int c = 0; c <= n; ++c) {
      ids.push_back(g.add_node({c * 100.0, r * 100.0}));
    }
  }
  const auto at = [&](int c, int r) { return ids[static_cast<std::size_t>(r * (n + 1) + c)]; };
  for (int r = 0; r <= n; ++r) {
    for (int c = 0; c <= n; ++c) {
      if (c < n) {
        g.add_edge(at(c, r), at(c + 1, r),
                   {{c * 100.0, r * 100.0}, {(c + 1) * 100.0, r * 100.0}}, "Path", 2);
      }
      if (r < n) {
        g.add_edge(at(c, r), at(c, r + 1),
                   {{c * 100.0, r * 100.0}, {c * 100.0, (r + 1) * 100.0}}, "Path", 2);
      }
    }
  }
  return g;
}

void BM_ComputeViewshed(benchmark::State& state) {
  const lpsim::RasterGrid dem = rough_dem(64);
  const lpsim::CellIndex observer{32, 32};
  const double radius = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lpsim::compute_viewshed(dem, observer, radius, 1.6));
  }
}
BENCHMARK(BM_ComputeViewshed)->Arg(100)->Arg(300);

void BM_NearestEdges(benchmark::State& state) {
  const lpsim::PathGraph g = lattice_graph(10);
  const lpsim::EdgeSpatialIndex index(g);
  lpsim::RngStream rng(2);
  for (auto _ : state) {
    const lpsim::Vec2 q{rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)};
    benchmark::DoNotOptimize(index.nearest_k(q, 3));
  }
}
BENCHMARK(BM_NearestEdges);

void BM_Matern25(benchmark::State& state) {
  lpsim::RngStream rng(3);
  const lpsim::Vec2 ls{0.2, 0.3};
  for (auto _ : state) {
    const lpsim::Vec2 a{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    const lpsim::Vec2 b{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    benchmark::DoNotOptimize(lpsim::matern25(a, b, ls, 1.0));
  }
}
BENCHMARK(BM_Matern25);

void BM_TraverseNetworkStep(benchmark::State& state) {
  lpsim::PathGraph g = lattice_graph(10);
  lpsim::RngStream rng(4);
  lpsim::AgentState s;
  s.phase = lpsim::AgentState::Phase::on_network;
  s.current_node = 0;
  s.position = g.nodes()[0].pos;
  std::vector<lpsim::Vec2> trace;
  for (auto _ : state) {
    trace.clear();
    benchmark::DoNotOptimize(lpsim::traverse_network_step(s, g, 5, rng, trace));
  }
}
BENCHMARK(BM_TraverseNetworkStep);

void BM_SampleTime(benchmark::State& state) {
  const lpsim::MobilityModel model;
  lpsim::RngStream rng(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lpsim::sample_time(model, rng));
  }
}
BENCHMARK(BM_SampleTime);

}  // namespace

BENCHMARK_MAIN();
