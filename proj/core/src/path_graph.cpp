#include "lpsim/path_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "lpsim/error.hpp"

namespace lpsim {

int score_of_type(std::string_view path_type) {
  if (path_type == "Major road") return 10;
  if (path_type == "Trunk road") return 5;
  if (path_type == "Path") return 2;
  return 4;
}

int PathGraph::add_node(Vec2 pos) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({id, pos});
  adjacency_.emplace_back();
  return id;
}

int PathGraph::add_edge(int v1, int v2, std::vector<Vec2> polyline, std::string path_type,
                        int score, bool one_shot) {
  if (v1 == v2) throw Error("add_edge: endpoints must be distinct nodes");
  PathEdge e;
  e.id = static_cast<int>(edges_.size());
  e.v1 = v1;
  e.v2 = v2;
  e.polyline = std::move(polyline);
  e.path_type = std::move(path_type);
  e.score = score;
  e.length = polyline_length(e.polyline);
  e.one_shot = one_shot;
  edges_.push_back(std::move(e));
  adjacency_[static_cast<std::size_t>(v1)].push_back(edges_.back().id);
  adjacency_[static_cast<std::size_t>(v2)].push_back(edges_.back().id);
  return edges_.back().id;
}

std::size_t PathGraph::active_edge_count() const {
  std::size_t n = 0;
  for (const auto& e : edges_) n += e.active ? 1 : 0;
  return n;
}

double PathGraph::total_length() const {
  double len = 0.0;
  for (const auto& e : edges_) {
    if (e.active) len += e.length;
  }
  return len;
}

int PathGraph::opposite_node(int edge_id, int node_id) const {
  const auto& e = edge(edge_id);
  return e.v1 == node_id ? e.v2 : e.v1;
}

void PathGraph::detach_edge(int edge_id) {
  auto& e = edges_[static_cast<std::size_t>(edge_id)];
  e.active = false;
  for (const int v : {e.v1, e.v2}) {
    auto& adj = adjacency_[static_cast<std::size_t>(v)];
    adj.erase(std::remove(adj.begin(), adj.end(), edge_id), adj.end());
  }
}

namespace {

// Drop consecutive duplicate vertices closer than 1e-12 m.
void dedupe(std::vector<Vec2>& poly) {
  std::vector<Vec2> out;
  out.reserve(poly.size());
  for (const Vec2 v : poly) {
    if (out.empty() || distance(out.back(), v) > 1e-12) out.push_back(v);
  }
  if (out.size() == 1 && !poly.empty()) out.push_back(poly.back());
  poly = std::move(out);
}

}  // namespace

PathGraph::SplitResult PathGraph::split_edge_at(int edge_id, Vec2 x) {
  const PathEdge e = edge(edge_id);  // copy: detach invalidates nothing but be safe
  if (!e.active) throw Error("split_edge_at: edge already replaced");
  const auto near = nearest_point_on_polyline(x, e.polyline);
  const Vec2 q = near.point;

  // Degenerate cut at an endpoint node: reuse that node, no split.
  if (distance(x, node(e.v1).pos) < 1e-9) return {e.v1, -1, -1};
  if (distance(x, node(e.v2).pos) < 1e-9) return {e.v2, -1, -1};

  // Piece from the cut back to v1, reversed to start at the cut.
  std::vector<Vec2> to_v1;
  to_v1.push_back(x);
  to_v1.push_back(q);
  for (std::size_t i = near.segment + 1; i-- > 0;) to_v1.push_back(e.polyline[i]);
  dedupe(to_v1);

  // Piece from the cut onward to v2, with the connector prepended.
  std::vector<Vec2> to_v2;
  to_v2.push_back(x);
  to_v2.push_back(q);
  for (std::size_t i = near.segment + 1; i < e.polyline.size(); ++i) to_v2.push_back(e.polyline[i]);
  dedupe(to_v2);

  detach_edge(edge_id);
  SplitResult result;
  result.new_node = add_node(x);
  result.edge_to_v1 = add_edge(result.new_node, e.v1, std::move(to_v1), e.path_type, e.score,
                               /*one_shot=*/true);
  result.edge_to_v2 = add_edge(result.new_node, e.v2, std::move(to_v2), e.path_type, e.score,
                               /*one_shot=*/true);
  return result;
}

namespace {

// Endpoint snapping: hash grid keyed at tolerance resolution, 3x3 probe.
class SnapIndex {
public:
  explicit SnapIndex(double tol) : tol_(tol) {}

  // Existing node within tol of p, or -1.
  int find(Vec2 p, const PathGraph& g) const {
    const std::int64_t cx = cell_of(p.x);
    const std::int64_t cy = cell_of(p.y);
    int best = -1;
    double best_d = tol_;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (const int id : it->second) {
          const double d = distance(g.node(id).pos, p);
          if (d <= best_d) {
            best_d = d;
            best = id;
          }
        }
      }
    }
    return best;
  }

  void insert(int node_id, Vec2 p) {
    cells_[key(cell_of(p.x), cell_of(p.y))].push_back(node_id);
  }

private:
  std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / tol_)); }
  static std::int64_t key(std::int64_t x, std::int64_t y) { return x * 0x100000000LL + y; }

  double tol_;
  std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

}  // namespace

PathGraph load_path_network(const std::filesystem::path& path, double snap_tolerance) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open path network file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.contains("features") || !doc["features"].is_array()) {
    throw FormatError(path.string() + ": expected a feature collection with a 'features' array");
  }

  PathGraph graph;
  SnapIndex snap(snap_tolerance);
  std::size_t feature_idx = 0;
  for (const auto& feature : doc["features"]) {
    const std::string where = path.string() + ": feature " + std::to_string(feature_idx++);
    if (!feature.contains("geometry") || !feature["geometry"].contains("coordinates")) {
      throw FormatError(where + ": missing geometry");
    }
    const auto& geom = feature["geometry"];
    if (geom.value("type", "") != "LineString") {
      throw FormatError(where + ": geometry type must be LineString");
    }
    std::vector<Vec2> poly;
    for (const auto& coord : geom["coordinates"]) {
      if (!coord.is_array() || coord.size() < 2) {
        throw FormatError(where + ": coordinate must be an [x, y] pair");
      }
      poly.push_back({coord[0].get<double>(), coord[1].get<double>()});
    }
    if (poly.size() < 2) throw FormatError(where + ": rejected, line has fewer than 2 vertices");

    if (!feature.contains("properties") || !feature["properties"].contains("path_type") ||
        !feature["properties"]["path_type"].is_string()) {
      throw FormatError(where + ": missing path_type property");
    }
    const std::string path_type = feature["properties"]["path_type"].get<std::string>();
    const int score = score_of_type(path_type);
    if (path_type != "Major road" && path_type != "Trunk road" && path_type != "Path") {
      std::cerr << "warning: " << where << ": path_type '" << path_type
                << "' not in the hierarchy, scored " << score << "\n";
    }

    auto resolve = [&](Vec2 p) {
      int id = snap.find(p, graph);
      if (id < 0) {
        id = graph.add_node(p);
        snap.insert(id, p);
      }
      return id;
    };
    const int a = resolve(poly.front());
    const int b = resolve(poly.back());
    poly.front() = graph.node(a).pos;
    poly.back() = graph.node(b).pos;
    dedupe(poly);

    if (a == b) {
      // Loop feature: both ends on one junction. Cut at the vertex nearest
      // half length so the undirected edge set keeps distinct endpoints.
      if (poly.size() < 3 || polyline_length(poly) <= 2.0 * snap_tolerance) {
        std::cerr << "note: dropping degenerate loop feature at node " << a << "\n";
        continue;
      }
      const double half = polyline_length(poly) / 2.0;
      double cum = 0.0;
      std::size_t cut = 1;
      for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        cum += distance(poly[i], poly[i + 1]);
        if (cum >= half) {
          cut = i + 1;
          break;
        }
      }
      cut = std::min(cut, poly.size() - 2);
      const int mid = graph.add_node(poly[cut]);
      std::vector<Vec2> first(poly.begin(), poly.begin() + static_cast<std::ptrdiff_t>(cut) + 1);
      std::vector<Vec2> second(poly.begin() + static_cast<std::ptrdiff_t>(cut), poly.end());
      graph.add_edge(a, mid, std::move(first), path_type, score);
      graph.add_edge(mid, b, std::move(second), path_type, score);
      continue;
    }
    graph.add_edge(a, b, std::move(poly), path_type, score);
  }
  return graph;
}

std::vector<NearestEdge> nearest_k_edges(Vec2 m, const PathGraph& graph, int k) {
  if (graph.empty()) throw EmptyInputError("nearest_k_edges: graph has no active edges");
  if (k < 1) throw Error("nearest_k_edges: k must be >= 1");
  std::vector<NearestEdge> all;
  for (const auto& e : graph.all_edges()) {
    if (!e.active) continue;
    const auto near = nearest_point_on_polyline(m, e.polyline);
    all.push_back({e.id, near.point, near.dist, near.along, e.score});
  }
  std::sort(all.begin(), all.end(), [](const NearestEdge& a, const NearestEdge& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.edge_id < b.edge_id;
  });
  if (all.size() > static_cast<std::size_t>(k)) all.resize(static_cast<std::size_t>(k));
  return all;
}

EdgeSpatialIndex::EdgeSpatialIndex(const PathGraph& graph, double bucket_size)
    : graph_(&graph), bucket_(bucket_size) {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -min_x, max_y = -min_y;
  double total_seg = 0.0;
  std::size_t n_seg = 0;
  for (const auto& e : graph.all_edges()) {
    if (!e.active) continue;
    for (std::size_t i = 0; i + 1 < e.polyline.size(); ++i) {
      total_seg += distance(e.polyline[i], e.polyline[i + 1]);
      ++n_seg;
    }
    for (const Vec2 v : e.polyline) {
      min_x = std::fmin(min_x, v.x);
      min_y = std::fmin(min_y, v.y);
      max_x = std::fmax(max_x, v.x);
      max_y = std::fmax(max_y, v.y);
    }
  }
  if (n_seg == 0) {
    bucket_ = 1.0;
    return;
  }
  if (bucket_ <= 0.0) {
    // A few segments per bucket on average; clamped so tiny or huge
    // networks still get sane occupancy.
    const double avg_seg = total_seg / static_cast<double>(n_seg);
    const double extent = std::fmax(max_x - min_x, max_y - min_y);
    bucket_ = std::fmax(std::fmax(2.0 * avg_seg, extent / 256.0), 1e-6);
  }
  min_x_ = min_x;
  min_y_ = min_y;
  for (const auto& e : graph.all_edges()) {
    if (!e.active) continue;
    for (std::size_t i = 0; i + 1 < e.polyline.size(); ++i) {
      insert_segment(e.polyline[i], e.polyline[i + 1],
                     {e.id, static_cast<std::uint32_t>(i)});
    }
  }
}

void EdgeSpatialIndex::insert_segment(Vec2 a, Vec2 b, SegRef ref) {
  // Amanatides-Woo traversal registers the segment in every bucket it crosses.
  const double ax = (a.x - min_x_) / bucket_;
  const double ay = (a.y - min_y_) / bucket_;
  const double bx = (b.x - min_x_) / bucket_;
  const double by = (b.y - min_y_) / bucket_;
  std::int64_t cx = static_cast<std::int64_t>(std::floor(ax));
  std::int64_t cy = static_cast<std::int64_t>(std::floor(ay));
  const std::int64_t ex = static_cast<std::int64_t>(std::floor(bx));
  const std::int64_t ey = static_cast<std::int64_t>(std::floor(by));
  const int step_x = bx > ax ? 1 : -1;
  const int step_y = by > ay ? 1 : -1;
  const double dx = std::fabs(bx - ax);
  const double dy = std::fabs(by - ay);
  double t_max_x = dx > 0 ? ((step_x > 0 ? cx + 1 - ax : ax - cx) / dx)
                          : std::numeric_limits<double>::infinity();
  double t_max_y = dy > 0 ? ((step_y > 0 ? cy + 1 - ay : ay - cy) / dy)
                          : std::numeric_limits<double>::infinity();
  const double t_delta_x = dx > 0 ? 1.0 / dx : 0.0;
  const double t_delta_y = dy > 0 ? 1.0 / dy : 0.0;

  auto deposit = [&](std::int64_t bx, std::int64_t by) {
    buckets_[bucket_key(bx, by)].push_back(ref);
    bmin_x_ = std::min(bmin_x_, bx);
    bmin_y_ = std::min(bmin_y_, by);
    bmax_x_ = std::max(bmax_x_, bx);
    bmax_y_ = std::max(bmax_y_, by);
  };
  if (bmax_x_ < bmin_x_) {
    bmin_x_ = bmax_x_ = cx;
    bmin_y_ = bmax_y_ = cy;
  }

  for (int guard = 0; guard < 1 << 20; ++guard) {
    deposit(cx, cy);
    if (cx == ex && cy == ey) break;
    if (t_max_x < t_max_y) {
      cx += step_x;
      t_max_x += t_delta_x;
    } else if (t_max_y < t_max_x) {
      cy += step_y;
      t_max_y += t_delta_y;
    } else {
      // Exact corner crossing: cover both adjacent buckets.
      deposit(cx + step_x, cy);
      deposit(cx, cy + step_y);
      cx += step_x;
      cy += step_y;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    }
  }
}

std::vector<NearestEdge> EdgeSpatialIndex::nearest_k(Vec2 m, int k) const {
  if (graph_ == nullptr || graph_->empty()) {
    throw EmptyInputError("EdgeSpatialIndex: graph has no active edges");
  }
  if (k < 1) throw Error("EdgeSpatialIndex: k must be >= 1");

  struct Best {
    NearestEdge ne;
    std::uint32_t seg = 0;
  };
  std::map<int, Best> best_per_edge;
  auto kth_dist = [&]() {
    if (best_per_edge.size() < static_cast<std::size_t>(k)) {
      return std::numeric_limits<double>::infinity();
    }
    std::vector<double> d;
    d.reserve(best_per_edge.size());
    for (const auto& [id, b] : best_per_edge) d.push_back(b.ne.dist);
    std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
    return d[static_cast<std::size_t>(k - 1)];
  };

  const std::int64_t qx = static_cast<std::int64_t>(std::floor((m.x - min_x_) / bucket_));
  const std::int64_t qy = static_cast<std::int64_t>(std::floor((m.y - min_y_) / bucket_));
  std::set<std::pair<int, std::uint32_t>> seen;

  // Rings past the populated bucket rectangle hold nothing.
  const std::int64_t max_ring =
      std::max({qx - bmin_x_, bmax_x_ - qx, qy - bmin_y_, bmax_y_ - qy, std::int64_t{0}});
  for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
    // Any segment first reachable at this ring is at least this far away;
    // strict comparison so boundary ties still fall to the edge-id order.
    const double ring_floor = ring > 0 ? static_cast<double>(ring - 1) * bucket_ : 0.0;
    if (best_per_edge.size() >= static_cast<std::size_t>(k) && kth_dist() < ring_floor) break;

    auto visit = [&](std::int64_t bx, std::int64_t by) {
      const auto it = buckets_.find(bucket_key(bx, by));
      if (it == buckets_.end()) return;
      for (const SegRef ref : it->second) {
        if (!seen.insert({ref.edge_id, ref.seg_index}).second) continue;
        const auto& e = graph_->edge(ref.edge_id);
        if (!e.active) continue;
        const Vec2 a = e.polyline[ref.seg_index];
        const Vec2 b = e.polyline[ref.seg_index + 1];
        const auto near = nearest_point_on_segment(m, a, b);
        auto& slot = best_per_edge[ref.edge_id];
        const bool better = slot.ne.edge_id == -1 || near.dist < slot.ne.dist ||
                            (near.dist == slot.ne.dist && ref.seg_index < slot.seg);
        if (better) {
          double along = 0.0;
          for (std::uint32_t i = 0; i < ref.seg_index; ++i) {
            along += distance(e.polyline[i], e.polyline[i + 1]);
          }
          slot.ne = {ref.edge_id, near.point, near.dist, along + near.t * distance(a, b), e.score};
          slot.seg = ref.seg_index;
        }
      }
    };

    if (ring == 0) {
      visit(qx, qy);
    } else {
      for (std::int64_t i = -ring; i <= ring; ++i) {
        visit(qx + i, qy - ring);
        visit(qx + i, qy + ring);
      }
      for (std::int64_t j = -ring + 1; j <= ring - 1; ++j) {
        visit(qx - ring, qy + j);
        visit(qx + ring, qy + j);
      }
    }
  }

  std::vector<NearestEdge> out;
  out.reserve(best_per_edge.size());
  for (const auto& [id, b] : best_per_edge) out.push_back(b.ne);
  std::sort(out.begin(), out.end(), [](const NearestEdge& a, const NearestEdge& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.edge_id < b.edge_id;
  });
  if (out.size() > static_cast<std::size_t>(k)) out.resize(static_cast<std::size_t>(k));
  return out;
}

bool EdgeSpatialIndex::any_within(Vec2 p, double radius) const {
  if (graph_ == nullptr || buckets_.empty()) return false;
  const std::int64_t qx = static_cast<std::int64_t>(std::floor((p.x - min_x_) / bucket_));
  const std::int64_t qy = static_cast<std::int64_t>(std::floor((p.y - min_y_) / bucket_));
  const std::int64_t rings = static_cast<std::int64_t>(std::ceil(radius / bucket_)) + 1;
  for (std::int64_t ring = 0; ring <= rings; ++ring) {
    auto probe = [&](std::int64_t bx, std::int64_t by) {
      const auto it = buckets_.find(bucket_key(bx, by));
      if (it == buckets_.end()) return false;
      for (const SegRef ref : it->second) {
        const auto& e = graph_->edge(ref.edge_id);
        if (!e.active) continue;
        const auto near = nearest_point_on_segment(p, e.polyline[ref.seg_index],
                                                   e.polyline[ref.seg_index + 1]);
        if (near.dist <= radius) return true;
      }
      return false;
    };
    if (ring == 0) {
      if (probe(qx, qy)) return true;
    } else {
      for (std::int64_t i = -ring; i <= ring; ++i) {
        if (probe(qx + i, qy - ring) || probe(qx + i, qy + ring)) return true;
      }
      for (std::int64_t j = -ring + 1; j <= ring - 1; ++j) {
        if (probe(qx - ring, qy + j) || probe(qx + ring, qy + j)) return true;
      }
    }
  }
  return false;
}

}  // namespace lpsim
