#ifndef LPSIM_BEHAVIORS_HPP
#define LPSIM_BEHAVIORS_HPP

#include <array>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lpsim/config.hpp"
#include "lpsim/path_graph.hpp"
#include "lpsim/rng.hpp"
#include "lpsim/terrain.hpp"
#include "lpsim/viewshed.hpp"

namespace lpsim {

enum class BehaviorKind : int {
  head_to_paths = 0,
  head_to_buildings = 1,
  head_to_trees = 2,
  head_to_water = 3,
};

std::string_view behavior_name(BehaviorKind b);
BehaviorKind parse_behavior(std::string_view name);  // throws FormatError

// Samples a behavior from the normalized mix.
BehaviorKind select_behavior(const BehaviorMix& mix, RngStream& rng);

// Chance that an agent crosses a watercourse with catchment value a:
// p = 1 - min(a/b, 1). Throws on negative a.
double crossing_probability(double a, double b = 8000.0);

struct WaterCrossingRule {
  double b = 8000.0;  // catchment value at which crossing chance reaches 0
};

// The eight grid moves in fixed tie-break order E, NE, N, NW, W, SW, S, SE.
struct NeighborStep {
  int dc = 0;
  int dr = 0;
  double bearing = 0.0;
};
const std::array<NeighborStep, 8>& neighbor_steps();

// Index of the neighbor whose center bearing is closest to `heading`;
// equal separations resolve to the earlier entry in the fixed order.
int nearest_neighbor_index(double heading);

struct AgentState {
  Vec2 position;
  double heading = 0.0;          // direction of the last executed move
  double command_heading = 0.0;  // last computed steering command
  double distance_traveled = 0.0;
  BehaviorKind behavior = BehaviorKind::head_to_paths;

  enum class Phase { seeking, on_network };
  Phase phase = Phase::seeking;

  int steps_taken = 0;  // executed grid steps; drives the viewshed cadence

  // network traversal bookkeeping (paths behavior)
  int current_node = -1;
  int arrival_edge = -1;
  int traversal_step = 0;
  std::vector<std::pair<int, int>> recent_edges;  // (edge id, traversal step)
};

struct StepOutcome {
  bool moved = false;       // a grid move or edge traversal was executed
  bool terminated = false;  // viewshed goal contact: path is complete
  bool attach = false;      // seek phase wants to join the network at the
                            // current position (caller owns the graph)
};

// Moves the agent to the 8-connected neighbor nearest the commanded heading.
// An out-of-bounds or nodata candidate is a rejected step; when `water` is
// given, a candidate on lake/sea/river water is accepted only with
// probability crossing_probability(candidate catchment). Every rejection
// rotates the commanded heading by +-90 degrees (fair coin) and the rotated
// candidate is retried under the same rules, up to 8 attempts. On success
// the move's exact center-to-center length is added to distance_traveled and
// the new position appended to `trace`. Returns whether a move happened.
bool grid_step(AgentState& s, const TerrainStack& terrain, double commanded,
               const WaterCrossingRule* water, RngStream& rng, std::vector<Vec2>& trace);

// Vector-field water behavior: commanded heading is the outflow direction at
// the agent's cell (previous heading where outflow is nodata).
StepOutcome step_water(AgentState& s, const TerrainStack& terrain, const WaterCrossingRule& rule,
                       RngStream& rng, std::vector<Vec2>& trace);

struct ViewshedBehaviorParams {
  double radius_m = 300.0;
  int cadence_steps = 10;
  double eye_height_m = 1.6;
  const ViewshedWeights* weights = nullptr;
};

// Viewshed behaviors (head_to_buildings / head_to_trees). Standing on the
// goal cover terminates the path. The steering command is recomputed every
// `cadence_steps` executed steps: mean angle toward the max-weight visible
// cells; with no weighted cell in sight the previous command is kept.
StepOutcome step_viewshed(AgentState& s, const TerrainStack& terrain,
                          const ViewshedBehaviorParams& params, RngStream& rng,
                          std::vector<Vec2>& trace);

// Eq-style weighted mean direction toward the k nearest edges: each nearest
// point contributes a unit vector scaled by score/distance; returns the
// quadrant-aware angle of the resultant. Throws on empty input or a zero
// distance (the caller must attach instead).
double weighted_path_angle(Vec2 m, std::span<const NearestEdge> nearest);

// Seek phase of the paths behavior: requests attachment once the nearest
// edge is within `attach_radius`, otherwise grid-steps along the weighted
// path angle of the k nearest edges.
StepOutcome step_seek(AgentState& s, const TerrainStack& terrain, const EdgeSpatialIndex& index,
                      int k, double attach_radius, RngStream& rng, std::vector<Vec2>& trace);

// Splits the edge nearest to x at its closest point, inserting a node at x
// (see PathGraph::split_edge_at). Returns the node the agent now stands on.
int attach_to_network(PathGraph& graph, Vec2 x);

// Choice distribution over the incident traversable edges at the agent's
// node: score 0.1 for an edge visited within the last lambda_max traversal
// steps, 1.0 otherwise, normalized. If no incident edge is traversable the
// arrival edge is re-enabled for this choice only (an agent never deadlocks).
std::vector<std::pair<int, double>> traversal_probabilities(const PathGraph& graph,
                                                            const AgentState& s, int lambda_max);

// Samples one edge from traversal_probabilities, walks its whole polyline
// (appended to `trace`), updates distance, memory and one-shot flags, and
// moves the agent to the far node.
StepOutcome traverse_network_step(AgentState& s, PathGraph& graph, int lambda_max, RngStream& rng,
                                  std::vector<Vec2>& trace);

// Dense debug view of the seeking-phase steering field: the weighted path
// angle evaluated at every cell center of `tmpl` (nodata where the graph is
// empty at that point, i.e. never for a nonempty graph).
RasterGrid seek_angle_field(const PathGraph& graph, const RasterGrid& tmpl, int k);

}  // namespace lpsim

#endif
