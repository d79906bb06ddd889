#ifndef LPSIM_RASTER_HPP
#define LPSIM_RASTER_HPP

#include <filesystem>
#include <optional>
#include <vector>

#include "lpsim/geometry.hpp"

namespace lpsim {

struct CellIndex {
  int col = 0;
  int row = 0;  // row 0 is the southernmost row
  bool operator==(const CellIndex&) const = default;
};

// Uniform square-cell georeferenced grid of scalars. Used for the DEM, the
// land cover IDs, the hydrology layers and the output probability maps.
//
// Values are stored row-major with row 0 at the south edge. The on-disk
// ASCII format stores the north row first; load/save do the flip.
struct RasterGrid {
  int n_cols = 0;
  int n_rows = 0;
  double cell_size = 0.0;
  double x_origin = 0.0;  // lower-left corner, meters east
  double y_origin = 0.0;  // lower-left corner, meters north
  double nodata = -9999.0;
  std::vector<double> values;

  static RasterGrid filled(int n_cols, int n_rows, double cell_size, Vec2 origin,
                           double value, double nodata = -9999.0);

  double at(CellIndex c) const { return values[static_cast<std::size_t>(c.row) * n_cols + c.col]; }
  double& at(CellIndex c) { return values[static_cast<std::size_t>(c.row) * n_cols + c.col]; }

  bool in_bounds(CellIndex c) const {
    return c.col >= 0 && c.col < n_cols && c.row >= 0 && c.row < n_rows;
  }
  bool is_nodata(double v) const { return v == nodata; }
  bool is_nodata_at(CellIndex c) const { return is_nodata(at(c)); }

  // Floor division by cell_size relative to the lower-left origin.
  // Out-of-bounds points map to nullopt, distinct from nodata cells.
  std::optional<CellIndex> cell_at(Vec2 p) const;

  // Center of a cell in world coordinates.
  Vec2 cell_center(CellIndex c) const {
    return {x_origin + (c.col + 0.5) * cell_size, y_origin + (c.row + 0.5) * cell_size};
  }

  double width() const { return n_cols * cell_size; }
  double height() const { return n_rows * cell_size; }

  // Same dimensions, cell size and origin (exact comparison).
  bool same_layout(const RasterGrid& o) const;

  // Bilinear interpolation of cell-center values at an arbitrary point.
  // Outside the center lattice the nearest cells are clamped. Returns
  // nullopt if any participating cell is nodata.
  std::optional<double> interpolate(Vec2 p) const;
};

// Plain-text ASCII grid: six `key value` header lines (ncols, nrows,
// xllcorner, yllcorner, cellsize, nodata_value) followed by n_rows rows of
// whitespace-separated values, north row first. Values round-trip exactly:
// save_raster emits shortest decimal forms that re-parse to the same bits.
RasterGrid load_raster(const std::filesystem::path& path);
void save_raster(const RasterGrid& grid, const std::filesystem::path& path);

}  // namespace lpsim

#endif
