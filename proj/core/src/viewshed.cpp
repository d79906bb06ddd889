#include "lpsim/viewshed.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lpsim/error.hpp"
#include "lpsim/text_io.hpp"

namespace lpsim {

void ViewshedWeights::set(int land_cover_id, double w_buildings, double w_trees, double w_water) {
  for (const double w : {w_buildings, w_trees, w_water}) {
    if (!(w > 0.0 && w <= 1.0)) {
      throw FormatError("viewshed weight for land cover id " + std::to_string(land_cover_id) +
                        " must lie in (0, 1]");
    }
  }
  rows_[land_cover_id] = {w_buildings, w_trees, w_water};
}

double ViewshedWeights::weight(int land_cover_id, ViewshedGoal goal) const {
  const auto it = rows_.find(land_cover_id);
  if (it == rows_.end()) return 0.0;
  return it->second[static_cast<std::size_t>(goal)];
}

ViewshedWeights default_viewshed_weights() {
  ViewshedWeights w;
  w.set(1, 0.05, 0.05, 0.05);   // Acid grassland
  w.set(2, 0.25, 0.25, 0.25);   // Arable and horticulture
  w.set(3, 0.01, 0.01, 0.01);   // Bog
  w.set(4, 0.05, 0.05, 0.05);   // Calcareous grassland
  w.set(5, 0.03, 0.03, 0.03);   // Fen, marsh, swamp
  w.set(6, 0.06, 0.06, 0.06);   // Heather
  w.set(7, 0.05, 0.05, 0.05);   // Heather grassland
  w.set(8, 0.05, 0.05, 0.05);   // Improved grassland
  w.set(9, 0.10, 0.10, 0.10);   // Neutral grassland
  w.set(10, 0.05, 0.05, 0.05);  // Rock
  w.set(11, 0.05, 0.05, 0.05);  // Saltmarsh
  w.set(12, 0.40, 0.20, 0.20);  // Urban
  w.set(13, 0.20, 0.20, 0.40);  // Water
  w.set(14, 0.20, 0.40, 0.20);  // Woodland
  return w;
}

ViewshedWeights load_viewshed_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open viewshed weights file: " + path.string());
  ViewshedWeights w;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string id_tok, b_tok, t_tok, w_tok;
    if (!(ls >> id_tok)) continue;  // blank line
    if (!(ls >> b_tok >> t_tok >> w_tok)) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 'id w_buildings w_trees w_water'");
    }
    std::string extra;
    if (ls >> extra) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": trailing token '" +
                        extra + "'");
    }
    const std::string where = path.string() + ":" + std::to_string(lineno);
    w.set(static_cast<int>(parse_int(id_tok, where)), parse_double(b_tok, where),
          parse_double(t_tok, where), parse_double(w_tok, where));
  }
  if (w.size() == 0) throw FormatError(path.string() + ": no weight rows");
  return w;
}

ViewshedMask compute_viewshed(const RasterGrid& dem, CellIndex observer, double radius,
                              double eye_height) {
  if (!dem.in_bounds(observer)) throw Error("compute_viewshed: observer out of bounds");
  const double z_obs_ground = dem.at(observer);
  if (dem.is_nodata(z_obs_ground)) throw Error("compute_viewshed: observer on nodata elevation");
  if (!(radius > 0.0)) throw Error("compute_viewshed: radius must be positive");

  const int reach = static_cast<int>(std::floor(radius / dem.cell_size));
  ViewshedMask mask;
  mask.center = observer;
  mask.radius = radius;
  mask.col0 = std::max(0, observer.col - reach);
  mask.row0 = std::max(0, observer.row - reach);
  const int col1 = std::min(dem.n_cols - 1, observer.col + reach);
  const int row1 = std::min(dem.n_rows - 1, observer.row + reach);
  mask.n_cols = col1 - mask.col0 + 1;
  mask.n_rows = row1 - mask.row0 + 1;
  mask.visible.assign(static_cast<std::size_t>(mask.n_cols) * mask.n_rows, 0);

  const Vec2 o = dem.cell_center(observer);
  const double z_obs = z_obs_ground + eye_height;
  const double step = dem.cell_size / 2.0;

  for (int r = mask.row0; r <= row1; ++r) {
    for (int c = mask.col0; c <= col1; ++c) {
      const CellIndex cell{c, r};
      if (cell == observer) {
        mask.slot(cell) = 1;
        continue;
      }
      const double z_tgt = dem.at(cell);
      if (dem.is_nodata(z_tgt)) continue;
      const Vec2 p = dem.cell_center(cell);
      const double dist = distance(o, p);
      if (dist > radius) continue;

      const int n = static_cast<int>(std::ceil(dist / step));
      bool blocked = false;
      for (int i = 1; i < n; ++i) {
        const double t = static_cast<double>(i) / n;
        const Vec2 q = o + (p - o) * t;
        const double sight = z_obs + (z_tgt - z_obs) * t;
        const auto ground = dem.interpolate(q);
        if (ground && *ground > sight) {
          blocked = true;
          break;
        }
      }
      if (!blocked) mask.slot(cell) = 1;
    }
  }
  return mask;
}

std::vector<CellIndex> max_weight_visible_cells(const ViewshedMask& mask,
                                                const RasterGrid& land_cover,
                                                const ViewshedWeights& weights, ViewshedGoal goal) {
  double best = 0.0;
  std::vector<CellIndex> out;
  for (int r = mask.row0; r < mask.row0 + mask.n_rows; ++r) {
    for (int c = mask.col0; c < mask.col0 + mask.n_cols; ++c) {
      const CellIndex cell{c, r};
      if (!mask.is_visible(cell) || !land_cover.in_bounds(cell)) continue;
      const double raw = land_cover.at(cell);
      if (land_cover.is_nodata(raw)) continue;
      const double w = weights.weight(static_cast<int>(raw), goal);
      if (w <= 0.0) continue;
      if (w > best) {
        best = w;
        out.clear();
      }
      if (w == best) out.push_back(cell);
    }
  }
  return out;
}

std::optional<double> mean_angle(Vec2 p, std::span<const Vec2> cells) {
  if (cells.empty()) return std::nullopt;
  double sum = 0.0;
  for (const Vec2 c : cells) sum += std::atan2(c.y - p.y, c.x - p.x);
  return sum / static_cast<double>(cells.size());
}

}  // namespace lpsim
