#ifndef LPSIM_TERRAIN_HPP
#define LPSIM_TERRAIN_HPP

#include <array>
#include <filesystem>
#include <string_view>

#include "lpsim/path_graph.hpp"
#include "lpsim/raster.hpp"

namespace lpsim {

// Land-cover legend used by the land_cover raster and the viewshed weight
// table. IDs are stable: they appear verbatim in raster files.
enum class LandCover : int {
  acid_grassland = 1,
  arable_horticulture = 2,
  bog = 3,
  calcareous_grassland = 4,
  fen_marsh_swamp = 5,
  heather = 6,
  heather_grassland = 7,
  improved_grassland = 8,
  neutral_grassland = 9,
  rock = 10,
  saltmarsh = 11,
  urban = 12,
  water = 13,
  woodland = 14,
};

inline constexpr int kLandCoverCount = 14;
std::string_view land_cover_name(int id);  // "?" for ids outside the legend

// Water-surface raster legend.
enum class WaterSurface : int { none = 0, lake = 1, sea = 2, river = 3 };

inline bool blocks_crossing(int ws) {
  return ws == static_cast<int>(WaterSurface::lake) || ws == static_cast<int>(WaterSurface::sea) ||
         ws == static_cast<int>(WaterSurface::river);
}

// Category a found location is assigned to, matching the reference data's
// domain.
enum class FoundCategory : int { open_ground = 0, road, building, trees, water };

inline constexpr int kFoundCategoryCount = 5;
inline constexpr std::array<FoundCategory, 5> kAllFoundCategories = {
    FoundCategory::open_ground, FoundCategory::road, FoundCategory::building,
    FoundCategory::trees, FoundCategory::water};

std::string_view found_category_name(FoundCategory c);
FoundCategory parse_found_category(std::string_view name);  // throws FormatError

// The five aligned raster layers the simulation reads.
struct TerrainStack {
  RasterGrid dem;            // elevation, meters
  RasterGrid land_cover;     // LandCover ids
  RasterGrid catchment;      // cumulative catchment count, >= 0
  RasterGrid water_surface;  // WaterSurface ids
  RasterGrid outflow_dir;    // radians, east = 0, counter-clockwise

  // Throws AlignmentError if any layer disagrees on shape, cell size, or
  // origin; throws FormatError on negative non-nodata catchment values.
  void validate() const;

  double cell_size() const { return dem.cell_size; }
  bool in_bounds(Vec2 p) const { return dem.cell_at(p).has_value(); }
};

// Loads dem.asc, land_cover.asc, catchment.asc, water_surface.asc and
// outflow_dir.asc from `dir` and validates alignment.
TerrainStack load_terrain(const std::filesystem::path& dir);

// Category assignment for one found location:
//   road       if p lies within one cell_size of any active edge polyline,
//   water      else if water_surface is lake/sea/river or land cover is Water,
//   building   else if land cover is Urban,
//   trees      else if land cover is Woodland,
//   open_ground otherwise.
// Throws Error if p is out of bounds.
FoundCategory classify_found(Vec2 p, const TerrainStack& terrain, const PathGraph& graph);

// Same classification against a prebuilt edge index, for bulk use.
class FoundClassifier {
public:
  FoundClassifier(const TerrainStack& terrain, const PathGraph& graph)
      : terrain_(&terrain), index_(graph) {}

  FoundCategory operator()(Vec2 p) const;

private:
  const TerrainStack* terrain_;
  EdgeSpatialIndex index_;
};

}  // namespace lpsim

#endif
