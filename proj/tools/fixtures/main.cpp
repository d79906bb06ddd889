// Deterministic generator for the synthetic-island fixture set: an aligned
// terrain raster stack, a small road/path network, a sparse start-location
// heatmap, reference data tables, and a checksum listing. Regenerating into
// a clean directory reproduces the committed data/ tree byte for byte.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lpsim/error.hpp"
#include "lpsim/geometry.hpp"
#include "lpsim/manifest.hpp"
#include "lpsim/metrics.hpp"
#include "lpsim/raster.hpp"
#include "lpsim/sampling.hpp"
#include "lpsim/terrain.hpp"
#include "lpsim/text_io.hpp"
#include "lpsim/viewshed.hpp"

namespace {

namespace fs = std::filesystem;
using lpsim::LandCover;
using lpsim::RasterGrid;
using lpsim::Vec2;

constexpr int kCells = 200;          // per axis
constexpr double kCellSize = 5.0;    // meters
constexpr Vec2 kCenter{500.0, 500.0};
constexpr double kIslandRadius = 480.0;

struct Disc {
  Vec2 center;
  double radius;
};

const std::vector<Disc> kUrban = {
    {{500, 300}, 35}, {{350, 480}, 35}, {{620, 420}, 35}, {{700, 580}, 35},
    {{420, 700}, 35}, {{560, 720}, 35}, {{280, 560}, 35}, {{590, 250}, 35},
};
const std::vector<Disc> kWoodland = {
    {{430, 380}, 40}, {{570, 340}, 40}, {{660, 500}, 40}, {{540, 600}, 40},
    {{360, 620}, 40}, {{450, 540}, 40}, {{300, 420}, 40}, {{640, 680}, 40},
    {{740, 480}, 40}, {{480, 240}, 40},
};
const Disc kLake{{380, 620}, 40};
const std::vector<Vec2> kRiver = {
    {640, 660}, {720, 640}, {800, 600}, {880, 560}, {960, 520}, {995, 502},
};

double base_elevation(Vec2 p) {
  const double d = lpsim::distance(p, kCenter);
  return 60.0 * (1.0 - (d / kIslandRadius) * (d / kIslandRadius));
}

double hill(Vec2 p, Vec2 c, double height, double sigma) {
  const double d2 = lpsim::dot(p - c, p - c);
  return height * std::exp(-d2 / (2.0 * sigma * sigma));
}

bool in_disc(Vec2 p, const Disc& d) { return lpsim::distance(p, d.center) <= d.radius; }

int band_land_cover(Vec2 p) {
  const double r = lpsim::distance(p, kCenter);
  const double a = std::atan2(p.y - kCenter.y, p.x - kCenter.x);
  if (r < 150.0) return static_cast<int>(LandCover::improved_grassland);
  if (r < 250.0) {
    if (a >= 0.0 && a < M_PI / 2.0) return static_cast<int>(LandCover::neutral_grassland);
    if (a >= M_PI / 2.0) return static_cast<int>(LandCover::acid_grassland);
    if (a < -M_PI / 2.0) return static_cast<int>(LandCover::calcareous_grassland);
    return static_cast<int>(LandCover::heather_grassland);
  }
  if (r < 340.0) {
    if (a >= 0.0 && a < M_PI / 2.0) return static_cast<int>(LandCover::bog);
    if (a >= M_PI / 2.0) return static_cast<int>(LandCover::fen_marsh_swamp);
    if (a < -M_PI / 2.0) return static_cast<int>(LandCover::heather);
    return static_cast<int>(LandCover::arable_horticulture);
  }
  return a >= 0.0 ? static_cast<int>(LandCover::rock) : static_cast<int>(LandCover::saltmarsh);
}

struct TerrainFiles {
  RasterGrid dem, land_cover, catchment, water_surface, outflow;
};

TerrainFiles make_terrain() {
  TerrainFiles t;
  t.dem = RasterGrid::filled(kCells, kCells, kCellSize, {0, 0}, 0.0);
  t.land_cover = t.dem;
  t.catchment = t.dem;
  t.water_surface = t.dem;
  t.outflow = t.dem;

  const double river_len = lpsim::polyline_length(kRiver);
  for (int row = 0; row < kCells; ++row) {
    for (int col = 0; col < kCells; ++col) {
      const lpsim::CellIndex cell{col, row};
      const Vec2 p = t.dem.cell_center(cell);
      const double base = base_elevation(p);
      if (base <= 0.0) {  // open sea: no elevation, impassable
        t.dem.at(cell) = t.dem.nodata;
        t.land_cover.at(cell) = static_cast<int>(LandCover::water);
        t.catchment.at(cell) = t.catchment.nodata;
        t.water_surface.at(cell) = static_cast<int>(lpsim::WaterSurface::sea);
        t.outflow.at(cell) = t.outflow.nodata;
        continue;
      }
      t.dem.at(cell) =
          base + hill(p, {650, 650}, 25.0, 80.0) + hill(p, {300, 350}, 18.0, 60.0);
      t.catchment.at(cell) = 10.0;
      t.water_surface.at(cell) = static_cast<int>(lpsim::WaterSurface::none);
      t.outflow.at(cell) = std::atan2(p.y - kCenter.y, p.x - kCenter.x);

      int lc = band_land_cover(p);
      for (const Disc& d : kWoodland) {
        if (in_disc(p, d)) lc = static_cast<int>(LandCover::woodland);
      }
      for (const Disc& d : kUrban) {
        if (in_disc(p, d)) lc = static_cast<int>(LandCover::urban);
      }
      if (in_disc(p, kLake)) {
        lc = static_cast<int>(LandCover::water);
        t.water_surface.at(cell) = static_cast<int>(lpsim::WaterSurface::lake);
        t.catchment.at(cell) = 3000.0;
      }
      const auto near = lpsim::nearest_point_on_polyline(p, kRiver);
      if (near.dist <= kCellSize) {  // one-cell-wide watercourse
        t.water_surface.at(cell) = static_cast<int>(lpsim::WaterSurface::river);
        t.catchment.at(cell) = 500.0 + (12000.0 - 500.0) * (near.along / river_len);
      }
      t.land_cover.at(cell) = lc;
    }
  }
  return t;
}

nlohmann::json line_feature(const std::vector<Vec2>& coords, const std::string& type) {
  nlohmann::json f;
  f["type"] = "Feature";
  f["properties"] = {{"path_type", type}};
  f["geometry"]["type"] = "LineString";
  auto& arr = f["geometry"]["coordinates"] = nlohmann::json::array();
  for (const Vec2& p : coords) arr.push_back({p.x, p.y});
  return f;
}

Vec2 ring_point(double degrees) {
  const double a = degrees * M_PI / 180.0;
  return {kCenter.x + 360.0 * std::cos(a), kCenter.y + 360.0 * std::sin(a)};
}

std::vector<Vec2> ring_arc(double from_deg, double to_deg) {
  std::vector<Vec2> pts;
  for (double d = from_deg; d <= to_deg + 1e-9; d += 5.0) pts.push_back(ring_point(d));
  return pts;
}

nlohmann::json make_network() {
  nlohmann::json doc;
  doc["type"] = "FeatureCollection";
  auto& features = doc["features"] = nlohmann::json::array();
  // Coastal ring as four arcs sharing endpoint nodes.
  features.push_back(line_feature(ring_arc(0, 90), "Major road"));
  features.push_back(line_feature(ring_arc(90, 180), "Major road"));
  features.push_back(line_feature(ring_arc(180, 270), "Major road"));
  features.push_back(line_feature(ring_arc(270, 360), "Major road"));
  // Trunk crosses meeting at the island center and ending on ring vertices.
  features.push_back(line_feature({ring_point(180), kCenter}, "Trunk road"));
  features.push_back(line_feature({kCenter, ring_point(0)}, "Trunk road"));
  features.push_back(line_feature({ring_point(270), kCenter}, "Trunk road"));
  features.push_back(line_feature({kCenter, ring_point(90)}, "Trunk road"));
  // Footpaths.
  features.push_back(line_feature({kCenter, {556, 556}, {608, 604}, {650, 650}}, "Path"));
  features.push_back(
      line_feature({{350, 480}, {390, 520}, {430, 560}, {470, 600}, {500, 640}}, "Path"));
  features.push_back(line_feature({{620, 420}, {660, 380}, {700, 340}, ring_point(315)}, "Path"));
  features.push_back(line_feature({{280, 560}, {230, 590}, ring_point(160)}, "Path"));
  features.push_back(line_feature({{520, 760}, {560, 790}, {600, 810}}, "Path"));
  return doc;
}

RasterGrid make_heatmap(const RasterGrid& dem) {
  RasterGrid h = RasterGrid::filled(10, 10, 100.0, {0, 0}, 0.0);
  for (int row = 0; row < h.n_rows; ++row) {
    for (int col = 0; col < h.n_cols; ++col) {
      const lpsim::CellIndex cell{col, row};
      const Vec2 p = h.cell_center(cell);
      const auto dem_cell = dem.cell_at(p);
      if (!dem_cell || dem.is_nodata_at(*dem_cell)) continue;  // offshore: zero mass
      const double blob1 = std::exp(-lpsim::dot(p - Vec2{450, 550}, p - Vec2{450, 550}) /
                                    (2.0 * 180.0 * 180.0));
      const double blob2 = 0.5 * std::exp(-lpsim::dot(p - Vec2{650, 350}, p - Vec2{650, 350}) /
                                          (2.0 * 120.0 * 120.0));
      h.at(cell) = 100.0 * (blob1 + blob2);
    }
  }
  return h;
}

void write_text(const fs::path& file, const std::string& body) {
  std::ofstream f(file, std::ios::binary);
  if (!f) throw lpsim::Error("cannot open for writing: " + file.string());
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw lpsim::Error("write failed: " + file.string());
}

std::string fixture_config() {
  return
      "# synthetic-island run configuration\n"
      "seed = 42\n"
      "cell_size_m = 5\n"
      "n_gen = 2000\n"
      "paths_per_start = 40\n"
      "viewshed_radius_m = 100\n"
      "m_samples = 200\n"
      "pdm_cell_size_m = 20\n"
      "workers = 0\n";
}

std::string mobility_histogram() {
  // Expected counts of the default mobility model over quarter-hour bins,
  // scaled to 400 observations and rounded. An approximation of a field
  // histogram, not field data.
  const lpsim::MobilityModel model;  // s=0.8, loc 0, scale 0.77
  std::string out = "# mobility time histogram, quarter-hour bins, 400 observations\n";
  for (int i = 0; i < 24; ++i) {
    const double lo = 0.25 * i;
    const double hi = 0.25 * (i + 1);
    const double mass = lpsim::lognormal_cdf(hi, model) - lpsim::lognormal_cdf(lo, model);
    const auto count = std::lround(400.0 * mass);
    out += lpsim::format_double(0.5 * (lo + hi));
    out += ' ';
    out += std::to_string(count);
    out += '\n';
  }
  return out;
}

std::string viewshed_weights_table() {
  const lpsim::ViewshedWeights w = lpsim::default_viewshed_weights();
  std::string out =
      "# land-cover attraction weights per viewshed goal\n"
      "# id  buildings  trees  water\n";
  for (int id = 1; id <= lpsim::kLandCoverCount; ++id) {
    out += std::to_string(id);
    for (const auto goal : {lpsim::ViewshedGoal::buildings, lpsim::ViewshedGoal::trees,
                            lpsim::ViewshedGoal::water}) {
      out += ' ';
      out += lpsim::format_double(w.weight(id, goal));
    }
    out += '\n';
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic-island fixture generator"};
  std::string out_str = "data";
  app.add_option("--out", out_str, "output directory (default: data)");
  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out = out_str;
    const fs::path island = out / "synthetic_island";
    fs::create_directories(island);
    fs::create_directories(out / "conformance");

    const TerrainFiles t = make_terrain();
    lpsim::save_raster(t.dem, island / "dem.asc");
    lpsim::save_raster(t.land_cover, island / "land_cover.asc");
    lpsim::save_raster(t.catchment, island / "catchment.asc");
    lpsim::save_raster(t.water_surface, island / "water_surface.asc");
    lpsim::save_raster(t.outflow, island / "outflow_dir.asc");
    write_text(island / "network.json", make_network().dump(2) + "\n");
    lpsim::save_raster(make_heatmap(t.dem), island / "pls_heatmap.asc");
    write_text(island / "config.txt", fixture_config());

    lpsim::CategoryHistogram reference;
    reference.counts = {53.0, 42.0, 30.0, 4.0, 1.0};
    lpsim::save_category_histogram(reference, out / "hiker_solo_categories.txt");
    write_text(out / "mobility_histogram.txt", mobility_histogram());
    write_text(out / "viewshed_weights.txt", viewshed_weights_table());

    // Tiny hand-checkable conformance inputs for the format round-trip tests.
    write_text(out / "conformance" / "raster_2x2.asc",
               "ncols 2\nnrows 2\nxllcorner 10\nyllcorner 20\ncellsize 5\n"
               "nodata_value -9999\n1.5 -9999\n3 4.25\n");
    nlohmann::json tiny;
    tiny["type"] = "FeatureCollection";
    tiny["features"] = nlohmann::json::array();
    tiny["features"].push_back(
        line_feature({{0, 0}, {100, 0}, {100, 100}}, "Path"));
    tiny["features"].push_back(line_feature({{100, 100}, {0, 100}}, "Trunk road"));
    write_text(out / "conformance" / "network_tiny.json", tiny.dump(2) + "\n");

    // Checksum every generated file so tests can verify the committed tree.
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(out)) {
      if (!entry.is_regular_file()) continue;
      if (entry.path().filename() == "CHECKSUMS.txt") continue;
      files.push_back(fs::relative(entry.path(), out));
    }
    std::sort(files.begin(), files.end());
    std::string sums;
    for (const fs::path& rel : files) {
      sums += lpsim::file_checksum(out / rel);
      sums += ' ';
      sums += rel.generic_string();
      sums += '\n';
    }
    write_text(out / "CHECKSUMS.txt", sums);

    std::cout << "wrote " << files.size() << " fixture files under " << out.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
