#include "lpsim/behaviors.hpp"

#include <algorithm>
#include <cmath>

#include "lpsim/error.hpp"

namespace lpsim {

std::string_view behavior_name(BehaviorKind b) {
  switch (b) {
    case BehaviorKind::head_to_paths: return "head_to_paths";
    case BehaviorKind::head_to_buildings: return "head_to_buildings";
    case BehaviorKind::head_to_trees: return "head_to_trees";
    case BehaviorKind::head_to_water: return "head_to_water";
  }
  return "?";
}

BehaviorKind parse_behavior(std::string_view name) {
  for (const BehaviorKind b :
       {BehaviorKind::head_to_paths, BehaviorKind::head_to_buildings, BehaviorKind::head_to_trees,
        BehaviorKind::head_to_water}) {
    if (behavior_name(b) == name) return b;
  }
  throw FormatError("unknown behavior: '" + std::string(name) + "'");
}

BehaviorKind select_behavior(const BehaviorMix& mix, RngStream& rng) {
  const double total = mix.paths + mix.buildings + mix.trees + mix.water;
  const double u = rng.uniform() * total;
  double cum = mix.paths;
  if (u < cum) return BehaviorKind::head_to_paths;
  cum += mix.buildings;
  if (u < cum) return BehaviorKind::head_to_buildings;
  cum += mix.trees;
  if (u < cum) return BehaviorKind::head_to_trees;
  return BehaviorKind::head_to_water;
}

double crossing_probability(double a, double b) {
  if (a < 0.0) throw Error("crossing_probability: catchment value must be non-negative");
  return 1.0 - std::fmin(a / b, 1.0);
}

const std::array<NeighborStep, 8>& neighbor_steps() {
  static const std::array<NeighborStep, 8> steps = {{
      {1, 0, 0.0},                  // E
      {1, 1, M_PI / 4.0},           // NE
      {0, 1, M_PI / 2.0},           // N
      {-1, 1, 3.0 * M_PI / 4.0},    // NW
      {-1, 0, M_PI},                // W
      {-1, -1, -3.0 * M_PI / 4.0},  // SW
      {0, -1, -M_PI / 2.0},         // S
      {1, -1, -M_PI / 4.0},         // SE
  }};
  return steps;
}

int nearest_neighbor_index(double heading) {
  const auto& steps = neighbor_steps();
  int best = 0;
  double best_sep = angle_between(heading, steps[0].bearing);
  for (int i = 1; i < 8; ++i) {
    const double sep = angle_between(heading, steps[i].bearing);
    if (sep < best_sep) {
      best_sep = sep;
      best = i;
    }
  }
  return best;
}

bool grid_step(AgentState& s, const TerrainStack& terrain, double commanded,
               const WaterCrossingRule* water, RngStream& rng, std::vector<Vec2>& trace) {
  const auto& steps = neighbor_steps();
  double want = commanded;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const auto cur = terrain.dem.cell_at(s.position);
    if (!cur) throw Error("grid_step: agent out of bounds");
    const int ni = nearest_neighbor_index(want);
    const CellIndex nxt{cur->col + steps[ni].dc, cur->row + steps[ni].dr};
    bool ok = terrain.dem.in_bounds(nxt) && !terrain.dem.is_nodata_at(nxt);
    if (ok && water != nullptr) {
      const double ws = terrain.water_surface.at(nxt);
      if (!terrain.water_surface.is_nodata(ws) && blocks_crossing(static_cast<int>(ws))) {
        const double a = terrain.catchment.at(nxt);
        const double catchment = terrain.catchment.is_nodata(a) ? 0.0 : a;
        ok = rng.bernoulli(crossing_probability(catchment, water->b));
      }
    }
    if (ok) {
      const Vec2 to = terrain.dem.cell_center(nxt);
      s.distance_traveled += distance(s.position, to);
      s.position = to;
      s.heading = steps[ni].bearing;
      s.steps_taken += 1;
      trace.push_back(to);
      return true;
    }
    want += rng.bernoulli(0.5) ? M_PI / 2.0 : -M_PI / 2.0;
  }
  return false;
}

StepOutcome step_water(AgentState& s, const TerrainStack& terrain, const WaterCrossingRule& rule,
                       RngStream& rng, std::vector<Vec2>& trace) {
  const auto cell = terrain.dem.cell_at(s.position);
  if (!cell) throw Error("step_water: agent out of bounds");
  double commanded = s.heading;
  const double flow = terrain.outflow_dir.at(*cell);
  if (!terrain.outflow_dir.is_nodata(flow)) commanded = flow;
  s.command_heading = commanded;
  StepOutcome out;
  out.moved = grid_step(s, terrain, commanded, &rule, rng, trace);
  return out;
}

StepOutcome step_viewshed(AgentState& s, const TerrainStack& terrain,
                          const ViewshedBehaviorParams& params, RngStream& rng,
                          std::vector<Vec2>& trace) {
  const auto cell = terrain.dem.cell_at(s.position);
  if (!cell) throw Error("step_viewshed: agent out of bounds");
  const int goal_cover = s.behavior == BehaviorKind::head_to_buildings
                             ? static_cast<int>(LandCover::urban)
                             : static_cast<int>(LandCover::woodland);
  const ViewshedGoal goal = s.behavior == BehaviorKind::head_to_buildings
                                ? ViewshedGoal::buildings
                                : ViewshedGoal::trees;

  const double lc = terrain.land_cover.at(*cell);
  if (!terrain.land_cover.is_nodata(lc) && static_cast<int>(lc) == goal_cover) {
    return {.moved = false, .terminated = true, .attach = false};
  }

  if (s.steps_taken % params.cadence_steps == 0) {
    const auto mask = compute_viewshed(terrain.dem, *cell, params.radius_m, params.eye_height_m);
    const auto cells = max_weight_visible_cells(mask, terrain.land_cover, *params.weights, goal);
    std::vector<Vec2> centers;
    centers.reserve(cells.size());
    for (const CellIndex c : cells) {
      const Vec2 center = terrain.dem.cell_center(c);
      if (distance(center, s.position) > 1e-9) centers.push_back(center);
    }
    if (const auto ang = mean_angle(s.position, centers)) s.command_heading = *ang;
  }

  StepOutcome out;
  out.moved = grid_step(s, terrain, s.command_heading, nullptr, rng, trace);
  return out;
}

double weighted_path_angle(Vec2 m, std::span<const NearestEdge> nearest) {
  if (nearest.empty()) throw EmptyInputError("weighted_path_angle: no nearest edges");
  Vec2 resultant;
  for (const NearestEdge& ne : nearest) {
    if (ne.dist <= 0.0) {
      throw Error("weighted_path_angle: agent is on a path; attach instead");
    }
    const double c = static_cast<double>(ne.score) / ne.dist;
    const Vec2 u = (ne.point - m) * (1.0 / ne.dist);
    resultant = resultant + u * c;
  }
  return bearing(resultant);
}

StepOutcome step_seek(AgentState& s, const TerrainStack& terrain, const EdgeSpatialIndex& index,
                      int k, double attach_radius, RngStream& rng, std::vector<Vec2>& trace) {
  const auto nearest1 = index.nearest_k(s.position, 1);
  if (nearest1.front().dist <= attach_radius) {
    return {.moved = false, .terminated = false, .attach = true};
  }
  const auto nearest = index.nearest_k(s.position, k);
  s.command_heading = weighted_path_angle(s.position, nearest);
  StepOutcome out;
  out.moved = grid_step(s, terrain, s.command_heading, nullptr, rng, trace);
  return out;
}

int attach_to_network(PathGraph& graph, Vec2 x) {
  const auto nearest = nearest_k_edges(x, graph, 1);
  return graph.split_edge_at(nearest.front().edge_id, x).new_node;
}

std::vector<std::pair<int, double>> traversal_probabilities(const PathGraph& graph,
                                                            const AgentState& s, int lambda_max) {
  std::vector<int> candidates;
  for (const int eid : graph.incident_edges(s.current_node)) {
    const auto& e = graph.edge(eid);
    if (e.active && e.traversable) candidates.push_back(eid);
  }
  if (candidates.empty()) {
    if (s.arrival_edge < 0 || !graph.edge(s.arrival_edge).active) {
      throw Error("traverse: no traversable edge and no arrival edge to re-enable");
    }
    candidates.push_back(s.arrival_edge);
  }

  std::vector<std::pair<int, double>> probs;
  probs.reserve(candidates.size());
  double total = 0.0;
  for (const int eid : candidates) {
    bool recent = false;
    for (const auto& [visited, step] : s.recent_edges) {
      if (visited == eid && step >= s.traversal_step - lambda_max) {
        recent = true;
        break;
      }
    }
    const double score = recent ? 0.1 : 1.0;
    probs.emplace_back(eid, score);
    total += score;
  }
  for (auto& [eid, p] : probs) p /= total;
  return probs;
}

StepOutcome traverse_network_step(AgentState& s, PathGraph& graph, int lambda_max, RngStream& rng,
                                  std::vector<Vec2>& trace) {
  const auto probs = traversal_probabilities(graph, s, lambda_max);
  const double u = rng.uniform();
  double cum = 0.0;
  int chosen = probs.back().first;
  for (const auto& [eid, p] : probs) {
    cum += p;
    if (u < cum) {
      chosen = eid;
      break;
    }
  }

  auto& e = graph.edge(chosen);
  const bool forward = e.v1 == s.current_node;
  if (forward) {
    for (std::size_t i = 1; i < e.polyline.size(); ++i) trace.push_back(e.polyline[i]);
  } else {
    for (std::size_t i = e.polyline.size() - 1; i-- > 0;) trace.push_back(e.polyline[i]);
  }
  s.distance_traveled += e.length;
  s.current_node = forward ? e.v2 : e.v1;
  s.position = graph.node(s.current_node).pos;
  if (trace.size() >= 2) {
    s.heading = bearing(trace.back() - trace[trace.size() - 2]);
  }
  s.recent_edges.emplace_back(chosen, s.traversal_step);
  s.traversal_step += 1;
  while (!s.recent_edges.empty() && s.recent_edges.front().second < s.traversal_step - lambda_max) {
    s.recent_edges.erase(s.recent_edges.begin());
  }
  s.arrival_edge = chosen;
  if (e.one_shot) e.traversable = false;

  return {.moved = true, .terminated = false, .attach = false};
}

RasterGrid seek_angle_field(const PathGraph& graph, const RasterGrid& tmpl, int k) {
  RasterGrid out = RasterGrid::filled(tmpl.n_cols, tmpl.n_rows, tmpl.cell_size,
                                      {tmpl.x_origin, tmpl.y_origin}, 0.0, tmpl.nodata);
  const EdgeSpatialIndex index(graph);
  for (int r = 0; r < out.n_rows; ++r) {
    for (int c = 0; c < out.n_cols; ++c) {
      const Vec2 p = out.cell_center({c, r});
      const auto nearest = index.nearest_k(p, k);
      if (nearest.front().dist <= 0.0) {
        out.at({c, r}) = out.nodata;  // on a path: the angle is undefined
      } else {
        out.at({c, r}) = weighted_path_angle(p, nearest);
      }
    }
  }
  return out;
}

}  // namespace lpsim
