#include "lpsim/terrain.hpp"

#include "lpsim/error.hpp"

namespace lpsim {

std::string_view land_cover_name(int id) {
  switch (static_cast<LandCover>(id)) {
    case LandCover::acid_grassland: return "Acid grassland";
    case LandCover::arable_horticulture: return "Arable and horticulture";
    case LandCover::bog: return "Bog";
    case LandCover::calcareous_grassland: return "Calcareous grassland";
    case LandCover::fen_marsh_swamp: return "Fen, marsh, swamp";
    case LandCover::heather: return "Heather";
    case LandCover::heather_grassland: return "Heather grassland";
    case LandCover::improved_grassland: return "Improved grassland";
    case LandCover::neutral_grassland: return "Neutral grassland";
    case LandCover::rock: return "Rock";
    case LandCover::saltmarsh: return "Saltmarsh";
    case LandCover::urban: return "Urban";
    case LandCover::water: return "Water";
    case LandCover::woodland: return "Woodland";
  }
  return "?";
}

std::string_view found_category_name(FoundCategory c) {
  switch (c) {
    case FoundCategory::open_ground: return "open_ground";
    case FoundCategory::road: return "road";
    case FoundCategory::building: return "building";
    case FoundCategory::trees: return "trees";
    case FoundCategory::water: return "water";
  }
  return "?";
}

FoundCategory parse_found_category(std::string_view name) {
  for (const FoundCategory c : kAllFoundCategories) {
    if (found_category_name(c) == name) return c;
  }
  throw FormatError("unknown found category: '" + std::string(name) + "'");
}

void TerrainStack::validate() const {
  const struct {
    const RasterGrid* grid;
    const char* name;
  } layers[] = {{&dem, "dem"},
                {&land_cover, "land_cover"},
                {&catchment, "catchment"},
                {&water_surface, "water_surface"},
                {&outflow_dir, "outflow_dir"}};
  for (const auto& layer : layers) {
    if (!dem.same_layout(*layer.grid)) {
      throw AlignmentError(std::string("terrain layer '") + layer.name +
                           "' does not align with dem (shape, cell size or origin differ)");
    }
  }
  for (const double v : catchment.values) {
    if (!catchment.is_nodata(v) && v < 0.0) {
      throw FormatError("catchment raster contains a negative value");
    }
  }
}

TerrainStack load_terrain(const std::filesystem::path& dir) {
  TerrainStack t;
  t.dem = load_raster(dir / "dem.asc");
  t.land_cover = load_raster(dir / "land_cover.asc");
  t.catchment = load_raster(dir / "catchment.asc");
  t.water_surface = load_raster(dir / "water_surface.asc");
  t.outflow_dir = load_raster(dir / "outflow_dir.asc");
  t.validate();
  return t;
}

namespace {

FoundCategory classify_cell(Vec2 p, const TerrainStack& terrain, bool near_road) {
  const auto cell = terrain.dem.cell_at(p);
  if (!cell) throw Error("classify_found: position out of bounds");
  if (near_road) return FoundCategory::road;
  const double ws = terrain.water_surface.at(*cell);
  if (!terrain.water_surface.is_nodata(ws) && blocks_crossing(static_cast<int>(ws))) {
    return FoundCategory::water;
  }
  const double lc_raw = terrain.land_cover.at(*cell);
  const int lc = terrain.land_cover.is_nodata(lc_raw) ? 0 : static_cast<int>(lc_raw);
  if (lc == static_cast<int>(LandCover::water)) return FoundCategory::water;
  if (lc == static_cast<int>(LandCover::urban)) return FoundCategory::building;
  if (lc == static_cast<int>(LandCover::woodland)) return FoundCategory::trees;
  return FoundCategory::open_ground;
}

}  // namespace

FoundCategory classify_found(Vec2 p, const TerrainStack& terrain, const PathGraph& graph) {
  bool near_road = false;
  for (const auto& e : graph.all_edges()) {
    if (!e.active) continue;
    if (nearest_point_on_polyline(p, e.polyline).dist <= terrain.cell_size()) {
      near_road = true;
      break;
    }
  }
  return classify_cell(p, terrain, near_road);
}

FoundCategory FoundClassifier::operator()(Vec2 p) const {
  return classify_cell(p, *terrain_, index_.any_within(p, terrain_->cell_size()));
}

}  // namespace lpsim
