#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "lpsim/error.hpp"
#include "lpsim/gp.hpp"
#include "lpsim/simulation.hpp"

using namespace lpsim;

TEST_CASE("sample_gaussian reproduces the requested moments") {
  StartModel model;
  model.mu = {1000.0, 2000.0};
  model.sigma_xx = 10000.0;
  model.sigma_yy = 10000.0;
  model.sigma_xy = 5000.0;  // correlation 0.5
  RngStream rng(321);

  const int n = 30000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2 p = sample_gaussian(model, rng);
    const double dx = p.x - model.mu.x, dy = p.y - model.mu.y;
    sx += dx;
    sy += dy;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  CHECK(std::fabs(sx / n) < 2.0);
  CHECK(std::fabs(sy / n) < 2.0);
  CHECK(std::sqrt(sxx / n) == doctest::Approx(100.0).epsilon(0.02));
  CHECK(std::sqrt(syy / n) == doctest::Approx(100.0).epsilon(0.02));
  const double rho = (sxy / n) / (std::sqrt(sxx / n) * std::sqrt(syy / n));
  CHECK(rho == doctest::Approx(0.5).epsilon(0.08));
}

TEST_CASE("a rank-deficient covariance collapses to a line, not a failure") {
  StartModel model;
  model.mu = {0.0, 0.0};
  model.sigma_xx = 100.0;
  model.sigma_xy = 100.0;
  model.sigma_yy = 100.0;  // perfectly correlated
  RngStream rng(5);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p = sample_gaussian(model, rng);
    CHECK(p.y == doctest::Approx(p.x).epsilon(1e-12));
  }

  StartModel degenerate = model;
  degenerate.sigma_xx = 0.0;
  degenerate.sigma_xy = 0.0;
  degenerate.sigma_yy = 0.0;
  const Vec2 fixed = sample_gaussian(degenerate, rng);
  CHECK(fixed.x == 0.0);
  CHECK(fixed.y == 0.0);
}

TEST_CASE("invalid covariances are rejected") {
  RngStream rng(1);
  StartModel neg;
  neg.sigma_xx = -1.0;
  CHECK_THROWS_AS(sample_gaussian(neg, rng), ConfigError);

  StartModel indefinite;
  indefinite.sigma_xx = 100.0;
  indefinite.sigma_xy = 200.0;  // implies sigma_yy >= 400
  indefinite.sigma_yy = 100.0;
  CHECK_THROWS_AS(sample_gaussian(indefinite, rng), ConfigError);
}

TEST_CASE("sample_start rejects sea, nodata and out-of-bounds draws") {
  TerrainStack t = fixtures::flat_terrain(3);  // 15 m square
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      t.water_surface.at({c, r}) = static_cast<double>(WaterSurface::sea);
  t.water_surface.at({1, 1}) = static_cast<double>(WaterSurface::none);

  StartModel model;
  model.mu = t.dem.cell_center({1, 1});
  model.sigma_xx = 100.0;
  model.sigma_yy = 100.0;

  RngStream rng(77);
  for (int i = 0; i < 50; ++i) {
    const Vec2 p = sample_start(model, t, rng, 100000);
    const auto cell = t.dem.cell_at(p);
    REQUIRE(cell.has_value());
    CHECK(cell->col == 1);
    CHECK(cell->row == 1);
  }

  t.water_surface.at({1, 1}) = static_cast<double>(WaterSurface::sea);  // nowhere left
  CHECK_THROWS_AS(sample_start(model, t, rng, 200), ConfigError);

  StartModel offshore = model;
  offshore.mu = {-500.0, -500.0};  // all mass out of bounds
  CHECK_THROWS_AS(sample_start(offshore, t, rng, 200), ConfigError);
}

namespace {

struct WorldFixture {
  TerrainStack terrain;
  PathGraph graph;
  EdgeSpatialIndex index;
  ViewshedWeights weights;
  SimContext ctx;

  explicit WorldFixture(Params params) : terrain(fixtures::flat_terrain(40)) {
    const char* json = R"({"type":"FeatureCollection","features":[
      {"type":"Feature","properties":{"path_type":"Path"},
       "geometry":{"type":"LineString","coordinates":[[20,100],[180,100]]}},
      {"type":"Feature","properties":{"path_type":"Trunk road"},
       "geometry":{"type":"LineString","coordinates":[[100,20],[100,180]]}}]})";
    fixtures::TempDir tmp("world");
    fixtures::write_file(tmp.file("net.json"), json);
    graph = load_path_network(tmp.file("net.json"), params.snap_tolerance_m);
    index = EdgeSpatialIndex(graph);
    weights = default_viewshed_weights();
    ctx.terrain = &terrain;
    ctx.graph = &graph;
    ctx.index = &index;
    ctx.weights = &weights;
    ctx.params = params;
  }
};

Params fast_params() {
  Params p;
  p.n_gen = 12;
  p.paths_per_start = 5;
  p.d_max_m = 80.0;
  p.sigma_xx = 100.0;
  p.sigma_xy = 0.0;
  p.sigma_yy = 100.0;
  p.viewshed_radius_m = 60.0;
  p.viewshed_cadence_steps = 5;
  p.workers = 1;
  return p;
}

RasterGrid toy_posterior() {
  RasterGrid g = RasterGrid::filled(4, 4, 50.0, {0, 0}, 0.0);
  g.at({1, 1}) = 0.5;   // center (75, 75)
  g.at({2, 2}) = 0.3;   // center (125, 125)
  g.at({1, 2}) = 0.2;   // center (75, 125)
  return g;
}

bool same_path(const SimulatedPath& a, const SimulatedPath& b) {
  if (a.index != b.index || a.behavior != b.behavior ||
      a.terminated_early != b.terminated_early)
    return false;
  if (a.vertices.size() != b.vertices.size()) return false;
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    if (a.vertices[i].x != b.vertices[i].x || a.vertices[i].y != b.vertices[i].y) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("run_path is deterministic and respects the distance budget") {
  const WorldFixture w(fast_params());

  const SimulatedPath a =
      run_path({52.5, 52.5}, BehaviorKind::head_to_water, w.ctx, RngStream::derive(9, 3));
  const SimulatedPath b =
      run_path({52.5, 52.5}, BehaviorKind::head_to_water, w.ctx, RngStream::derive(9, 3));
  CHECK(same_path(a, b));

  CHECK(a.vertices.front().x == 52.5);
  CHECK(a.cumulative_lengths.front() == 0.0);
  REQUIRE(a.cumulative_lengths.size() == a.vertices.size());
  for (std::size_t i = 1; i < a.vertices.size(); ++i) {
    const double seg = distance(a.vertices[i - 1], a.vertices[i]);
    CHECK(a.cumulative_lengths[i] ==
          doctest::Approx(a.cumulative_lengths[i - 1] + seg).epsilon(1e-12));
  }

  // Whole moves are never clipped: the budget is met or exceeded by less
  // than one diagonal move, unless the behavior ended the path early.
  for (std::uint64_t id = 0; id < 8; ++id) {
    for (const BehaviorKind kind :
         {BehaviorKind::head_to_water, BehaviorKind::head_to_paths, BehaviorKind::head_to_trees}) {
      const SimulatedPath p = run_path({97.5, 52.5}, kind, w.ctx, RngStream::derive(17, id));
      if (!p.terminated_early) {
        CHECK(p.total_length() >= w.ctx.params.d_max_m);
      }
      // network edges are longer than one cell, so allow the longest edge
      const double slack = kind == BehaviorKind::head_to_paths
                               ? 160.0
                               : w.ctx.params.cell_size_m * std::sqrt(2.0) + 1e-9;
      CHECK(p.total_length() < w.ctx.params.d_max_m + slack);
    }
  }
}

TEST_CASE("run_monte_carlo is a pure function of inputs and seed") {
  const Params params = fast_params();
  const WorldFixture w(params);
  const RasterGrid posterior = toy_posterior();
  const std::uint64_t seed = 20260401;

  const std::vector<SimulatedPath> actual = run_monte_carlo(w.ctx, posterior, seed);
  REQUIRE(static_cast<int>(actual.size()) == params.n_gen);

  // Reconstruct every path from the documented draw order.
  RngStream anchor_stream = RngStream::derive(seed, std::numeric_limits<std::uint64_t>::max());
  const std::vector<Vec2> anchors = sample_pls(posterior, 3, anchor_stream);
  for (int i = 0; i < params.n_gen; ++i) {
    RngStream stream = RngStream::derive(seed, static_cast<std::uint64_t>(i));
    const BehaviorKind behavior = select_behavior(params.mix(), stream);
    StartModel model;
    model.mu = anchors[static_cast<std::size_t>(i / 5)];
    model.sigma_xx = params.sigma_xx;
    model.sigma_xy = params.sigma_xy;
    model.sigma_yy = params.sigma_yy;
    const Vec2 start = sample_start(model, w.terrain, stream, params.start_max_rejects);
    SimulatedPath expected = run_path(start, behavior, w.ctx, std::move(stream));
    expected.index = i;
    CAPTURE(i);
    CHECK(same_path(expected, actual[i]));
  }

  // Worker count is scheduling, not semantics.
  Params multi = params;
  multi.workers = 4;
  WorldFixture w4(multi);
  const std::vector<SimulatedPath> threaded = run_monte_carlo(w4.ctx, posterior, seed);
  REQUIRE(threaded.size() == actual.size());
  for (std::size_t i = 0; i < actual.size(); ++i) {
    CAPTURE(i);
    CHECK(same_path(actual[i], threaded[i]));
  }
}

TEST_CASE("path persistence round-trips exactly") {
  const WorldFixture w(fast_params());
  std::vector<SimulatedPath> paths;
  std::uint64_t id = 0;
  for (const BehaviorKind kind : {BehaviorKind::head_to_paths, BehaviorKind::head_to_water,
                                  BehaviorKind::head_to_trees, BehaviorKind::head_to_buildings}) {
    SimulatedPath p = run_path({102.5, 97.5}, kind, w.ctx, RngStream::derive(33, id));
    p.index = static_cast<int>(id++);
    paths.push_back(std::move(p));
  }

  fixtures::TempDir tmp("paths");
  write_paths(paths, tmp.file("paths.txt"));
  const std::vector<SimulatedPath> back = read_paths(tmp.file("paths.txt"));
  REQUIRE(back.size() == paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    CHECK(same_path(paths[i], back[i]));
    CHECK(back[i].start.x == paths[i].vertices[0].x);
  }

  // A second save of the parsed paths is byte-identical.
  write_paths(back, tmp.file("again.txt"));
  CHECK(fixtures::read_file(tmp.file("again.txt")) == fixtures::read_file(tmp.file("paths.txt")));
}

TEST_CASE("path records parse by hand and reject corruption") {
  fixtures::TempDir tmp("pathio");

  fixtures::write_file(tmp.file("ok.txt"), "3 head_to_water 1 5 2 0 0 3 4\n");
  const auto ok = read_paths(tmp.file("ok.txt"));
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].index == 3);
  CHECK(ok[0].behavior == BehaviorKind::head_to_water);
  CHECK(ok[0].terminated_early);
  CHECK(ok[0].total_length() == 5.0);
  REQUIRE(ok[0].vertices.size() == 2);
  CHECK(ok[0].vertices[1].x == 3.0);

  fixtures::write_file(tmp.file("len.txt"), "0 head_to_paths 0 5.1 2 0 0 3 4\n");
  CHECK_THROWS_AS(read_paths(tmp.file("len.txt")), FormatError);
  fixtures::write_file(tmp.file("count.txt"), "0 head_to_paths 0 5 3 0 0 3 4\n");
  CHECK_THROWS_AS(read_paths(tmp.file("count.txt")), FormatError);
  fixtures::write_file(tmp.file("trail.txt"), "0 head_to_paths 0 5 2 0 0 3 4 9\n");
  CHECK_THROWS_AS(read_paths(tmp.file("trail.txt")), FormatError);
  fixtures::write_file(tmp.file("kind.txt"), "0 head_to_pub 0 5 2 0 0 3 4\n");
  CHECK_THROWS_AS(read_paths(tmp.file("kind.txt")), FormatError);
  fixtures::write_file(tmp.file("flag.txt"), "0 head_to_paths 2 5 2 0 0 3 4\n");
  CHECK_THROWS_AS(read_paths(tmp.file("flag.txt")), FormatError);
  fixtures::write_file(tmp.file("zero.txt"), "0 head_to_paths 0 0 0\n");
  CHECK_THROWS_AS(read_paths(tmp.file("zero.txt")), FormatError);
  CHECK_THROWS_AS(read_paths(tmp.file("absent.txt")), MissingInputError);

  fixtures::write_file(tmp.file("empty.txt"), "");
  CHECK(read_paths(tmp.file("empty.txt")).empty());
}
