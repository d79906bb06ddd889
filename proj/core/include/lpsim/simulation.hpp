#ifndef LPSIM_SIMULATION_HPP
#define LPSIM_SIMULATION_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lpsim/behaviors.hpp"
#include "lpsim/config.hpp"
#include "lpsim/terrain.hpp"

namespace lpsim {

// Bivariate Gaussian start-location model (jitter around a PLS anchor).
struct StartModel {
  Vec2 mu;
  double sigma_xx = 10000.0;
  double sigma_xy = 0.0;
  double sigma_yy = 10000.0;
};

// One exact draw: mu + L z with L the (PSD-safe) Cholesky factor of sigma
// and z a pair of independent standard normals.
Vec2 sample_gaussian(const StartModel& model, RngStream& rng);

// Redraws until the point is in bounds, off nodata elevation and off sea.
// Throws ConfigError after max_rejects consecutive rejections (the model's
// mass lies off-map).
Vec2 sample_start(const StartModel& model, const TerrainStack& terrain, RngStream& rng,
                  int max_rejects = 10000);

struct SimulatedPath {
  int index = 0;
  BehaviorKind behavior = BehaviorKind::head_to_paths;
  bool terminated_early = false;
  Vec2 start;
  std::vector<Vec2> vertices;              // vertices[0] == start
  std::vector<double> cumulative_lengths;  // parallel to vertices, [0] == 0

  double total_length() const { return cumulative_lengths.back(); }
};

// Immutable inputs shared by all concurrent path runs.
struct SimContext {
  const TerrainStack* terrain = nullptr;
  const PathGraph* graph = nullptr;        // base network, never mutated
  const EdgeSpatialIndex* index = nullptr;  // over the base network
  const ViewshedWeights* weights = nullptr;
  Params params;
};

// Runs one agent from `start` until a distance check sees >= d_max (whole
// moves are never clipped, so the final length may overshoot) or the
// behavior terminates the path early. Deterministic in (inputs, rng state).
SimulatedPath run_path(Vec2 start, BehaviorKind behavior, const SimContext& ctx, RngStream rng);

// Full Monte Carlo: draws ceil(n_gen / paths_per_start) start anchors from
// the posterior grid (on the reserved stream id 2^64-1), then runs n_gen
// paths; path i uses the stream derived from (seed, i) to draw its
// behavior, its Gaussian start jitter around anchor [i / paths_per_start],
// and all its movement decisions. Results are a pure function of
// (inputs, seed), independent of worker count and scheduling.
std::vector<SimulatedPath> run_monte_carlo(const SimContext& ctx, const RasterGrid& pls_posterior,
                                           std::uint64_t seed);

// Line-delimited persistence:
//   <index> <behavior> <early 0|1> <total_length> <n> <x0> <y0> ... <xn-1> <yn-1>
// Doubles use shortest round-trip decimals, so a write/read cycle is exact.
// read_paths recomputes each path's length and rejects the file if the
// declared total disagrees beyond 1e-6 m.
void write_paths(std::span<const SimulatedPath> paths, const std::filesystem::path& path);
std::vector<SimulatedPath> read_paths(const std::filesystem::path& path);

}  // namespace lpsim

#endif
