#ifndef LPSIM_VIEWSHED_HPP
#define LPSIM_VIEWSHED_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "lpsim/raster.hpp"

namespace lpsim {

// Visibility mask over the window of cells within `radius` of the observer.
struct ViewshedMask {
  CellIndex center;
  double radius = 0.0;
  int col0 = 0, row0 = 0;      // window anchor (south-west corner)
  int n_cols = 0, n_rows = 0;  // window extent
  std::vector<std::uint8_t> visible;

  bool in_window(CellIndex c) const {
    return c.col >= col0 && c.col < col0 + n_cols && c.row >= row0 && c.row < row0 + n_rows;
  }
  bool is_visible(CellIndex c) const {
    if (!in_window(c)) return false;
    return visible[static_cast<std::size_t>(c.row - row0) * n_cols + (c.col - col0)] != 0;
  }
  std::uint8_t& slot(CellIndex c) {
    return visible[static_cast<std::size_t>(c.row - row0) * n_cols + (c.col - col0)];
  }
};

// The three target columns of the weight table.
enum class ViewshedGoal : int { buildings = 0, trees = 1, water = 2 };

// Land-cover id -> weight in (0,1], one column per goal.
class ViewshedWeights {
public:
  void set(int land_cover_id, double w_buildings, double w_trees, double w_water);
  // 0 for ids without an entry (unweighted cover never attracts).
  double weight(int land_cover_id, ViewshedGoal goal) const;
  bool has(int land_cover_id) const { return rows_.count(land_cover_id) != 0; }
  std::size_t size() const { return rows_.size(); }

private:
  std::unordered_map<int, std::array<double, 3>> rows_;
};

// Built-in default table covering the full 14-id land-cover legend.
ViewshedWeights default_viewshed_weights();

// Text file: one row per id, `id  w_buildings  w_trees  w_water`, '#' comments.
ViewshedWeights load_viewshed_weights(const std::filesystem::path& path);

// Line-of-sight visibility. Exact rule, shared with the test oracle:
//   * candidate cells are those with center-to-center distance <= radius;
//   * the observer's cell is always visible; cells with nodata elevation
//     are never visible;
//   * the sightline runs from (observer center, dem[observer]+eye_height) to
//     (target center, dem[target]) and is sampled at n = ceil(dist/(cell_size/2))
//     interior points t_i = i/n (i = 1..n-1);
//   * sightline height at t is z_obs + (z_tgt - z_obs)*t; terrain height is
//     the bilinear interpolation of the DEM at the sample point (a sample
//     whose interpolation touches nodata does not block);
//   * the target is visible iff no sample has terrain > sightline.
// Throws Error if the observer is out of bounds or on nodata elevation.
ViewshedMask compute_viewshed(const RasterGrid& dem, CellIndex observer, double radius,
                              double eye_height);

// The visible cells whose land-cover weight equals the maximum weight present
// among visible cells; empty iff no visible cell carries a weighted cover.
std::vector<CellIndex> max_weight_visible_cells(const ViewshedMask& mask,
                                                const RasterGrid& land_cover,
                                                const ViewshedWeights& weights, ViewshedGoal goal);

// Arithmetic mean over `cells` of the quadrant-aware bearing from p toward
// each cell center. Empty input is a "no target" signal, not an error.
std::optional<double> mean_angle(Vec2 p, std::span<const Vec2> cells);

}  // namespace lpsim

#endif
