#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "lpsim/error.hpp"
#include "lpsim/path_graph.hpp"
#include "lpsim/rng.hpp"
#include "oracles.hpp"

using namespace lpsim;

namespace {

std::string feature(const std::string& coords, const std::string& type) {
  return R"({"geometry":{"type":"LineString","coordinates":)" + coords +
         R"(},"properties":{"path_type":")" + type + R"("}})";
}

std::string collection(const std::vector<std::string>& features) {
  std::string out = R"({"features":[)";
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (i) out += ',';
    out += features[i];
  }
  out += "]}";
  return out;
}

PathGraph random_graph(std::uint64_t seed, int n_edges) {
  RngStream rng(seed);
  PathGraph g;
  for (int i = 0; i < n_edges; ++i) {
    std::vector<Vec2> poly;
    const int n_verts = 2 + static_cast<int>(rng.uniform_index(3));
    for (int v = 0; v < n_verts; ++v) {
      poly.push_back({rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)});
    }
    const int a = g.add_node(poly.front());
    const int b = g.add_node(poly.back());
    g.add_edge(a, b, poly, "Path", 2);
  }
  return g;
}

}  // namespace

TEST_CASE("path hierarchy scores") {
  CHECK(score_of_type("Major road") == 10);
  CHECK(score_of_type("Trunk road") == 5);
  CHECK(score_of_type("Path") == 2);
  CHECK(score_of_type("Bridleway") == 4);
  CHECK(score_of_type("") == 4);
}

TEST_CASE("the conformance network loads with shared junctions") {
  const PathGraph g =
      load_path_network(fixtures::data_dir() / "conformance" / "network_tiny.json");
  CHECK(g.node_count() == 3);
  CHECK(g.active_edge_count() == 2);
  const PathEdge& path_edge = g.edge(0);
  CHECK(path_edge.path_type == "Path");
  CHECK(path_edge.score == 2);
  CHECK(path_edge.length == doctest::Approx(200.0));
  const PathEdge& trunk = g.edge(1);
  CHECK(trunk.score == 5);
  CHECK(trunk.length == doctest::Approx(100.0));
  CHECK(g.total_length() == doctest::Approx(300.0));

  // The shared endpoint (100,100) must be one node with both edges incident.
  int shared = -1;
  for (const PathNode& n : g.nodes()) {
    if (distance(n.pos, {100, 100}) < 1e-9) shared = n.id;
  }
  REQUIRE(shared >= 0);
  CHECK(g.incident_edges(shared).size() == 2);
  CHECK(g.opposite_node(0, shared) == g.edge(0).v1);
}

TEST_CASE("endpoint snapping merges within tolerance only") {
  fixtures::TempDir tmp("graph");
  const std::string json = collection({
      feature("[[0,0],[10,0]]", "Path"),
      feature("[[10,0.3],[20,0]]", "Path"),
  });
  fixtures::write_file(tmp.file("net.json"), json);

  const PathGraph snapped = load_path_network(tmp.file("net.json"), 0.5);
  CHECK(snapped.node_count() == 3);
  // The second polyline's start is moved onto the shared node position.
  CHECK(distance(snapped.edge(1).polyline.front(), {10, 0}) < 1e-12);

  const PathGraph apart = load_path_network(tmp.file("net.json"), 0.1);
  CHECK(apart.node_count() == 4);
}

TEST_CASE("network loader rejects malformed features") {
  fixtures::TempDir tmp("graph");

  fixtures::write_file(tmp.file("short.json"), collection({feature("[[0,0]]", "Path")}));
  CHECK_THROWS_AS(load_path_network(tmp.file("short.json")), FormatError);

  fixtures::write_file(
      tmp.file("notype.json"),
      collection({R"({"geometry":{"type":"LineString","coordinates":[[0,0],[1,1]]},"properties":{}})"}));
  CHECK_THROWS_AS(load_path_network(tmp.file("notype.json")), FormatError);

  fixtures::write_file(tmp.file("badgeom.json"),
                       collection({R"({"geometry":{"type":"Point","coordinates":[0,0]},)"
                                   R"("properties":{"path_type":"Path"}})"}));
  CHECK_THROWS_AS(load_path_network(tmp.file("badgeom.json")), FormatError);

  fixtures::write_file(tmp.file("nofeat.json"), R"({"type":"FeatureCollection"})");
  CHECK_THROWS_AS(load_path_network(tmp.file("nofeat.json")), FormatError);

  fixtures::write_file(tmp.file("badjson.json"), "{not json");
  CHECK_THROWS_AS(load_path_network(tmp.file("badjson.json")), FormatError);

  CHECK_THROWS_AS(load_path_network(tmp.file("absent.json")), MissingInputError);
}

TEST_CASE("unknown path types load with the fallback score") {
  fixtures::TempDir tmp("graph");
  fixtures::write_file(tmp.file("odd.json"), collection({feature("[[0,0],[5,0]]", "Towpath")}));
  const PathGraph g = load_path_network(tmp.file("odd.json"));
  CHECK(g.active_edge_count() == 1);
  CHECK(g.edge(0).score == 4);
}

TEST_CASE("loop features are cut at their halfway vertex") {
  fixtures::TempDir tmp("graph");
  fixtures::write_file(tmp.file("loop.json"),
                       collection({feature("[[0,0],[100,0],[100,100],[0,0]]", "Path")}));
  const PathGraph g = load_path_network(tmp.file("loop.json"));
  CHECK(g.node_count() == 2);
  CHECK(g.active_edge_count() == 2);
  const double total = g.total_length();
  CHECK(total == doctest::Approx(200.0 + std::sqrt(2.0) * 100.0));
  // Both pieces share the loop junction and the cut vertex.
  CHECK(g.edge(0).v1 != g.edge(0).v2);
  CHECK(g.edge(1).v1 != g.edge(1).v2);
}

TEST_CASE("split_edge_at replaces an edge with two one-shot halves") {
  PathGraph g;
  const int a = g.add_node({0, 0});
  const int b = g.add_node({10, 0});
  const int e = g.add_edge(a, b, {{0, 0}, {10, 0}}, "Path", 2);

  const auto split = g.split_edge_at(e, {5, 1});
  REQUIRE(split.new_node >= 0);
  CHECK(g.node(split.new_node).pos == Vec2{5, 1});
  CHECK_FALSE(g.edge(e).active);
  CHECK(g.active_edge_count() == 2);

  const PathEdge& to_a = g.edge(split.edge_to_v1);
  const PathEdge& to_b = g.edge(split.edge_to_v2);
  CHECK(to_a.one_shot);
  CHECK(to_b.one_shot);
  CHECK(to_a.length == doctest::Approx(6.0));  // 1 m connector + 5 m of path
  CHECK(to_b.length == doctest::Approx(6.0));
  CHECK(to_a.polyline.front() == Vec2{5, 1});
  CHECK(to_a.polyline.back() == Vec2{0, 0});
  CHECK(to_b.polyline.back() == Vec2{10, 0});
  CHECK(to_a.score == 2);

  // The replaced edge is gone from adjacency; the halves are present.
  const auto& adj_a = g.incident_edges(a);
  CHECK(std::find(adj_a.begin(), adj_a.end(), e) == adj_a.end());
  CHECK(std::find(adj_a.begin(), adj_a.end(), split.edge_to_v1) != adj_a.end());
  CHECK(g.incident_edges(split.new_node).size() == 2);
}

TEST_CASE("splitting at an endpoint reuses the endpoint node") {
  PathGraph g;
  const int a = g.add_node({0, 0});
  const int b = g.add_node({10, 0});
  const int e = g.add_edge(a, b, {{0, 0}, {10, 0}}, "Path", 2);
  const auto split = g.split_edge_at(e, {0, 0});
  CHECK(split.new_node == a);
  CHECK(split.edge_to_v1 == -1);
  CHECK(split.edge_to_v2 == -1);
  CHECK(g.edge(e).active);
  CHECK(g.active_edge_count() == 1);
}

TEST_CASE("self-loop edges are rejected at construction") {
  PathGraph g;
  const int a = g.add_node({0, 0});
  CHECK_THROWS_AS(g.add_edge(a, a, {{0, 0}, {1, 1}, {0, 0}}, "Path", 2), Error);
}

TEST_CASE("nearest-edge queries agree with an exhaustive reference scan") {
  for (const std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
    const PathGraph g = random_graph(seed, 25);
    const EdgeSpatialIndex index(g);
    RngStream rng(seed + 1000);
    for (int q = 0; q < 50; ++q) {
      const Vec2 p{rng.uniform(-100.0, 1100.0), rng.uniform(-100.0, 1100.0)};
      for (const int k : {1, 3, 7}) {
        const auto expect = oracles::brute_nearest_k(g, p, k);
        const auto scan = nearest_k_edges(p, g, k);
        const auto fast = index.nearest_k(p, k);
        REQUIRE(scan.size() == expect.size());
        REQUIRE(fast.size() == expect.size());
        for (std::size_t i = 0; i < expect.size(); ++i) {
          CHECK(scan[i].edge_id == expect[i].edge_id);
          CHECK(fast[i].edge_id == expect[i].edge_id);
          CHECK(scan[i].dist == doctest::Approx(expect[i].dist).epsilon(1e-12));
          CHECK(fast[i].dist == scan[i].dist);
          CHECK(fast[i].along == scan[i].along);
          CHECK(scan[i].along == doctest::Approx(expect[i].along).epsilon(1e-9));
          CHECK(scan[i].score == expect[i].score);
        }
      }
    }
  }
}

TEST_CASE("any_within agrees with the nearest distance") {
  const PathGraph g = random_graph(7, 15);
  const EdgeSpatialIndex index(g);
  RngStream rng(99);
  for (int q = 0; q < 100; ++q) {
    const Vec2 p{rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)};
    const double d = index.nearest_k(p, 1).front().dist;
    CHECK(index.any_within(p, d + 1e-6));
    if (d > 1e-6) CHECK_FALSE(index.any_within(p, d - 1e-6));
  }
}

TEST_CASE("queries on empty graphs fail loudly") {
  PathGraph g;
  CHECK_THROWS_AS(nearest_k_edges({0, 0}, g, 1), EmptyInputError);
  PathGraph one = random_graph(1, 1);
  CHECK_THROWS_AS(nearest_k_edges({0, 0}, one, 0), Error);
}

TEST_CASE("split edges disappear from spatial queries") {
  PathGraph g;
  const int a = g.add_node({0, 0});
  const int b = g.add_node({100, 0});
  const int e = g.add_edge(a, b, {{0, 0}, {100, 0}}, "Path", 2);
  g.split_edge_at(e, {50, 5});
  for (const auto& ne : nearest_k_edges({50, 20}, g, 10)) CHECK(ne.edge_id != e);
}
