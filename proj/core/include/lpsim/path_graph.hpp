#ifndef LPSIM_PATH_GRAPH_HPP
#define LPSIM_PATH_GRAPH_HPP

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "lpsim/geometry.hpp"

namespace lpsim {

struct PathNode {
  int id = 0;
  Vec2 pos;
};

// An edge carries the physical polyline of one path segment. Split edges
// created when an agent attaches to the network are one-shot: they become
// non-traversable after the agent has moved along them.
struct PathEdge {
  int id = 0;
  int v1 = 0;
  int v2 = 0;
  std::vector<Vec2> polyline;  // first vertex at v1's position, last at v2's
  std::string path_type;
  int score = 4;
  double length = 0.0;
  bool traversable = true;
  bool one_shot = false;
  bool active = true;  // false once replaced by a split
};

// Path hierarchy score. Total function: unknown types take the else arm.
int score_of_type(std::string_view path_type);

// Undirected graph of path junctions and polyline edges.
class PathGraph {
public:
  int add_node(Vec2 pos);
  // Polyline must run from v1's position to v2's position.
  int add_edge(int v1, int v2, std::vector<Vec2> polyline, std::string path_type,
               int score, bool one_shot = false);

  const std::vector<PathNode>& nodes() const { return nodes_; }
  const PathNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const PathEdge& edge(int id) const { return edges_[static_cast<std::size_t>(id)]; }
  PathEdge& edge(int id) { return edges_[static_cast<std::size_t>(id)]; }
  const std::vector<PathEdge>& all_edges() const { return edges_; }
  const std::vector<int>& incident_edges(int node_id) const {
    return adjacency_[static_cast<std::size_t>(node_id)];
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t active_edge_count() const;
  double total_length() const;  // active edges only
  bool empty() const { return active_edge_count() == 0; }

  // Given one endpoint of an edge, the other.
  int opposite_node(int edge_id, int node_id) const;

  // Replaces edge `edge_id` with two one-shot edges meeting at a new node
  // placed at `x`. The polyline is cut at the point nearest to `x`; one
  // piece is reversed to start at x and a straight connector from x to the
  // cut point is prepended to both pieces. Returns the new node id.
  struct SplitResult {
    int new_node = -1;
    int edge_to_v1 = -1;
    int edge_to_v2 = -1;
  };
  SplitResult split_edge_at(int edge_id, Vec2 x);

private:
  void detach_edge(int edge_id);

  std::vector<PathNode> nodes_;
  std::vector<PathEdge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

// JSON feature collection of LineString features with a `path_type`
// property. Endpoints within `snap_tolerance` meters are merged into shared
// nodes and polyline ends are moved onto the shared node position.
PathGraph load_path_network(const std::filesystem::path& path, double snap_tolerance = 0.5);

struct NearestEdge {
  int edge_id = -1;
  Vec2 point;          // closest point on the edge's polyline
  double dist = std::numeric_limits<double>::infinity();
  double along = 0.0;  // arc length from the edge's v1 end to `point`
  int score = 4;       // the edge's path-hierarchy score
};

// The k distinct active edges nearest to m, sorted by (distance, edge id).
// Returns fewer than k when the graph has fewer active edges. Exhaustive
// scan; the spatial index below accelerates the same query.
std::vector<NearestEdge> nearest_k_edges(Vec2 m, const PathGraph& graph, int k);

// Uniform-grid segment index for nearest-edge queries on a frozen graph.
// Exact: returns the same edges and distances as nearest_k_edges.
class EdgeSpatialIndex {
public:
  EdgeSpatialIndex() = default;
  explicit EdgeSpatialIndex(const PathGraph& graph, double bucket_size = 0.0);

  std::vector<NearestEdge> nearest_k(Vec2 m, int k) const;
  // True if any active edge's polyline lies within `radius` of p.
  bool any_within(Vec2 p, double radius) const;

private:
  struct SegRef {
    int edge_id;
    std::uint32_t seg_index;
  };
  std::int64_t bucket_key(std::int64_t bx, std::int64_t by) const {
    return bx * 0x100000000LL + by;
  }
  void insert_segment(Vec2 a, Vec2 b, SegRef ref);

  const PathGraph* graph_ = nullptr;
  double bucket_ = 0.0;
  double min_x_ = 0.0, min_y_ = 0.0;
  std::int64_t bmin_x_ = 0, bmin_y_ = 0, bmax_x_ = -1, bmax_y_ = -1;
  std::unordered_map<std::int64_t, std::vector<SegRef>> buckets_;
};

}  // namespace lpsim

#endif
