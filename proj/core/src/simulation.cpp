#include "lpsim/simulation.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "lpsim/error.hpp"
#include "lpsim/gp.hpp"
#include "lpsim/text_io.hpp"

namespace lpsim {

Vec2 sample_gaussian(const StartModel& model, RngStream& rng) {
  // 2x2 Cholesky, tolerant of semi-definite sigma (zero variance collapses
  // the corresponding axis instead of failing).
  if (model.sigma_xx < 0.0 || model.sigma_yy < 0.0) {
    throw ConfigError("start model: negative variance");
  }
  const double l11 = std::sqrt(model.sigma_xx);
  const double l21 = l11 > 0.0 ? model.sigma_xy / l11 : 0.0;
  const double rem = model.sigma_yy - l21 * l21;
  if (rem < -1e-9 * std::max(1.0, model.sigma_yy)) {
    throw ConfigError("start model: covariance is not positive semi-definite");
  }
  const double l22 = std::sqrt(std::max(rem, 0.0));
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  return {model.mu.x + l11 * z1, model.mu.y + l21 * z1 + l22 * z2};
}

Vec2 sample_start(const StartModel& model, const TerrainStack& terrain, RngStream& rng,
                  int max_rejects) {
  for (int rejects = 0; rejects <= max_rejects; ++rejects) {
    const Vec2 p = sample_gaussian(model, rng);
    const auto cell = terrain.dem.cell_at(p);
    if (!cell) continue;
    if (terrain.dem.is_nodata_at(*cell)) continue;
    const double ws = terrain.water_surface.at(*cell);
    if (!terrain.water_surface.is_nodata(ws) &&
        static_cast<int>(ws) == static_cast<int>(WaterSurface::sea)) {
      continue;
    }
    return p;
  }
  throw ConfigError("sample_start: rejected " + std::to_string(max_rejects) +
                    " consecutive draws; start model mass lies off-map");
}

SimulatedPath run_path(Vec2 start, BehaviorKind behavior, const SimContext& ctx, RngStream rng) {
  const Params& P = ctx.params;
  SimulatedPath path;
  path.behavior = behavior;
  path.start = start;
  path.vertices.push_back(start);

  AgentState s;
  s.position = start;
  s.behavior = behavior;
  s.heading = rng.uniform(-M_PI, M_PI);
  s.command_heading = s.heading;

  const WaterCrossingRule water{P.catchment_bound};
  ViewshedBehaviorParams vs;
  vs.radius_m = P.viewshed_radius_m;
  vs.cadence_steps = P.viewshed_cadence_steps;
  vs.eye_height_m = P.eye_height_m;
  vs.weights = ctx.weights;

  PathGraph private_graph;  // copied from the base network at attachment
  bool have_private = false;

  int stall = 0;
  while (s.distance_traveled < P.d_max_m) {
    StepOutcome out;
    switch (behavior) {
      case BehaviorKind::head_to_water:
        out = step_water(s, *ctx.terrain, water, rng, path.vertices);
        break;
      case BehaviorKind::head_to_buildings:
      case BehaviorKind::head_to_trees:
        out = step_viewshed(s, *ctx.terrain, vs, rng, path.vertices);
        break;
      case BehaviorKind::head_to_paths:
        if (s.phase == AgentState::Phase::seeking) {
          out = step_seek(s, *ctx.terrain, *ctx.index, P.k_nearest, P.cell_size_m, rng,
                          path.vertices);
          if (out.attach) {
            if (!have_private) {
              private_graph = *ctx.graph;
              have_private = true;
            }
            s.current_node = attach_to_network(private_graph, s.position);
            s.phase = AgentState::Phase::on_network;
            continue;
          }
        } else {
          out = traverse_network_step(s, private_graph, P.lambda_max, rng, path.vertices);
        }
        break;
    }
    if (out.terminated) {
      path.terminated_early = true;
      break;
    }
    if (!out.moved) {
      // Fully blocked agents (no valid neighbor at all) end their path early
      // rather than spinning; does not occur on well-formed terrain.
      if (++stall >= 64) {
        path.terminated_early = true;
        break;
      }
    } else {
      stall = 0;
    }
  }

  path.cumulative_lengths.resize(path.vertices.size());
  path.cumulative_lengths[0] = 0.0;
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    path.cumulative_lengths[i] =
        path.cumulative_lengths[i - 1] + distance(path.vertices[i - 1], path.vertices[i]);
  }
  return path;
}

std::vector<SimulatedPath> run_monte_carlo(const SimContext& ctx, const RasterGrid& pls_posterior,
                                           std::uint64_t seed) {
  const Params& P = ctx.params;
  if (P.n_gen < 1) throw ConfigError("run_monte_carlo: n_gen must be >= 1");
  const int pps = std::max(1, P.paths_per_start);
  const int n_starts = (P.n_gen + pps - 1) / pps;

  RngStream anchor_stream =
      RngStream::derive(seed, std::numeric_limits<std::uint64_t>::max());
  const std::vector<Vec2> anchors = sample_pls(pls_posterior, n_starts, anchor_stream);

  std::vector<SimulatedPath> paths(static_cast<std::size_t>(P.n_gen));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto work = [&]() {
    try {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= P.n_gen) return;
        RngStream stream = RngStream::derive(seed, static_cast<std::uint64_t>(i));
        const BehaviorKind behavior = select_behavior(P.mix(), stream);
        StartModel model;
        model.mu = anchors[static_cast<std::size_t>(i / pps)];
        model.sigma_xx = P.sigma_xx;
        model.sigma_xy = P.sigma_xy;
        model.sigma_yy = P.sigma_yy;
        const Vec2 start = sample_start(model, *ctx.terrain, stream, P.start_max_rejects);
        paths[static_cast<std::size_t>(i)] = run_path(start, behavior, ctx, std::move(stream));
        paths[static_cast<std::size_t>(i)].index = i;
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      next.store(P.n_gen);  // drain remaining work
    }
  };

  int workers = P.workers > 0 ? P.workers
                              : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min({workers, P.n_gen, 256});
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return paths;
}

void write_paths(std::span<const SimulatedPath> paths, const std::filesystem::path& path) {
  std::string out;
  out.reserve(paths.size() * 256);
  for (const SimulatedPath& p : paths) {
    out += std::to_string(p.index);
    out += ' ';
    out += behavior_name(p.behavior);
    out += p.terminated_early ? " 1 " : " 0 ";
    append_double(out, p.total_length());
    out += ' ';
    out += std::to_string(p.vertices.size());
    for (const Vec2 v : p.vertices) {
      out += ' ';
      append_double(out, v.x);
      out += ' ';
      append_double(out, v.y);
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("write failed: " + path.string());
}

std::vector<SimulatedPath> read_paths(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open path file: " + path.string());
  std::vector<SimulatedPath> paths;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    std::istringstream ls(line);
    std::string idx_tok, behavior_tok, early_tok, len_tok, n_tok;
    if (!(ls >> idx_tok >> behavior_tok >> early_tok >> len_tok >> n_tok)) {
      throw FormatError(where + ": truncated path record");
    }
    SimulatedPath p;
    p.index = static_cast<int>(parse_int(idx_tok, where));
    p.behavior = parse_behavior(behavior_tok);
    if (early_tok != "0" && early_tok != "1") {
      throw FormatError(where + ": early flag must be 0 or 1");
    }
    p.terminated_early = early_tok == "1";
    const double declared = parse_double(len_tok, where);
    const long long n = parse_int(n_tok, where);
    if (n < 1) throw FormatError(where + ": path must have at least one vertex");
    p.vertices.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
      std::string x_tok, y_tok;
      if (!(ls >> x_tok >> y_tok)) throw FormatError(where + ": truncated vertex list");
      p.vertices.push_back({parse_double(x_tok, where), parse_double(y_tok, where)});
    }
    std::string extra;
    if (ls >> extra) throw FormatError(where + ": trailing tokens after vertex list");
    p.start = p.vertices.front();
    p.cumulative_lengths.resize(p.vertices.size());
    p.cumulative_lengths[0] = 0.0;
    for (std::size_t i = 1; i < p.vertices.size(); ++i) {
      p.cumulative_lengths[i] =
          p.cumulative_lengths[i - 1] + distance(p.vertices[i - 1], p.vertices[i]);
    }
    if (std::fabs(p.total_length() - declared) > 1e-6) {
      throw FormatError(where + ": declared length " + format_double(declared) +
                        " disagrees with recomputed " + format_double(p.total_length()));
    }
    paths.push_back(std::move(p));
  }
  return paths;
}

}  // namespace lpsim
