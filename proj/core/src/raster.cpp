#include "lpsim/raster.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "lpsim/error.hpp"

namespace lpsim {

RasterGrid RasterGrid::filled(int n_cols, int n_rows, double cell_size, Vec2 origin,
                              double value, double nodata) {
  RasterGrid g;
  g.n_cols = n_cols;
  g.n_rows = n_rows;
  g.cell_size = cell_size;
  g.x_origin = origin.x;
  g.y_origin = origin.y;
  g.nodata = nodata;
  g.values.assign(static_cast<std::size_t>(n_cols) * n_rows, value);
  return g;
}

std::optional<CellIndex> RasterGrid::cell_at(Vec2 p) const {
  const double fc = std::floor((p.x - x_origin) / cell_size);
  const double fr = std::floor((p.y - y_origin) / cell_size);
  if (fc < 0 || fr < 0 || fc >= n_cols || fr >= n_rows) return std::nullopt;
  return CellIndex{static_cast<int>(fc), static_cast<int>(fr)};
}

bool RasterGrid::same_layout(const RasterGrid& o) const {
  return n_cols == o.n_cols && n_rows == o.n_rows && cell_size == o.cell_size &&
         x_origin == o.x_origin && y_origin == o.y_origin;
}

std::optional<double> RasterGrid::interpolate(Vec2 p) const {
  // Work in the cell-center lattice: center (c,r) sits at origin+(c+.5,r+.5)*cs.
  const double gx = (p.x - x_origin) / cell_size - 0.5;
  const double gy = (p.y - y_origin) / cell_size - 0.5;
  int c0 = static_cast<int>(std::floor(gx));
  int r0 = static_cast<int>(std::floor(gy));
  double tx = gx - c0;
  double ty = gy - r0;
  // Clamp to the lattice so edge cells extrapolate flatly.
  if (c0 < 0) { c0 = 0; tx = 0.0; }
  if (r0 < 0) { r0 = 0; ty = 0.0; }
  if (c0 >= n_cols - 1) { c0 = n_cols - 1; tx = 0.0; }
  if (r0 >= n_rows - 1) { r0 = n_rows - 1; ty = 0.0; }
  const int c1 = std::min(c0 + 1, n_cols - 1);
  const int r1 = std::min(r0 + 1, n_rows - 1);
  const double v00 = at({c0, r0});
  const double v10 = at({c1, r0});
  const double v01 = at({c0, r1});
  const double v11 = at({c1, r1});
  if (is_nodata(v00) || is_nodata(v10) || is_nodata(v01) || is_nodata(v11)) return std::nullopt;
  const double top = v00 * (1.0 - tx) + v10 * tx;
  const double bot = v01 * (1.0 - tx) + v11 * tx;
  return top * (1.0 - ty) + bot * ty;
}

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(std::string_view tok, const std::filesystem::path& path,
                    const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw FormatError(path.string() + ": invalid numeric value for " + what + ": '" +
                      std::string(tok) + "'");
  }
  return v;
}

// Shortest decimal form that round-trips to the same double.
void append_double(std::string& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

}  // namespace

RasterGrid load_raster(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open raster file: " + path.string());

  RasterGrid g;
  bool have[6] = {};
  const char* keys[6] = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"};
  for (int i = 0; i < 6; ++i) {
    std::string key, value;
    if (!(in >> key >> value)) {
      throw FormatError(path.string() + ": truncated header, missing key " + keys[i]);
    }
    key = to_lower(key);
    int k = -1;
    for (int j = 0; j < 6; ++j) {
      if (key == keys[j]) k = j;
    }
    if (k < 0) throw FormatError(path.string() + ": unknown header key '" + key + "'");
    if (have[k]) throw FormatError(path.string() + ": duplicate header key '" + key + "'");
    have[k] = true;
    switch (k) {
      case 0: g.n_cols = static_cast<int>(parse_double(value, path, "ncols")); break;
      case 1: g.n_rows = static_cast<int>(parse_double(value, path, "nrows")); break;
      case 2: g.x_origin = parse_double(value, path, "xllcorner"); break;
      case 3: g.y_origin = parse_double(value, path, "yllcorner"); break;
      case 4: g.cell_size = parse_double(value, path, "cellsize"); break;
      case 5: g.nodata = parse_double(value, path, "nodata_value"); break;
    }
  }
  if (g.n_cols <= 0) throw FormatError(path.string() + ": header key ncols must be positive");
  if (g.n_rows <= 0) throw FormatError(path.string() + ": header key nrows must be positive");
  if (g.cell_size <= 0) throw FormatError(path.string() + ": header key cellsize must be positive");

  const std::size_t n = static_cast<std::size_t>(g.n_cols) * g.n_rows;
  std::vector<double> file_order;
  file_order.reserve(n);
  std::string tok;
  while (file_order.size() < n && (in >> tok)) {
    file_order.push_back(parse_double(tok, path, "cell value"));
  }
  if (file_order.size() < n) {
    throw FormatError(path.string() + ": truncated values, expected " + std::to_string(n) +
                      " got " + std::to_string(file_order.size()));
  }
  if (in >> tok) {
    throw FormatError(path.string() + ": trailing values beyond ncols*nrows");
  }

  // File stores the north row first; flip to row 0 = south.
  g.values.resize(n);
  for (int r = 0; r < g.n_rows; ++r) {
    const double* src = file_order.data() + static_cast<std::size_t>(r) * g.n_cols;
    double* dst = g.values.data() + static_cast<std::size_t>(g.n_rows - 1 - r) * g.n_cols;
    std::copy(src, src + g.n_cols, dst);
  }
  return g;
}

void save_raster(const RasterGrid& grid, const std::filesystem::path& path) {
  if (grid.n_cols <= 0 || grid.n_rows <= 0 || grid.cell_size <= 0.0) {
    throw FormatError("save_raster: grid has non-positive dimensions");
  }
  if (grid.values.size() != static_cast<std::size_t>(grid.n_cols) * grid.n_rows) {
    throw FormatError("save_raster: values length does not match ncols*nrows");
  }
  std::string out;
  out.reserve(grid.values.size() * 8 + 128);
  out += "ncols " + std::to_string(grid.n_cols) + "\n";
  out += "nrows " + std::to_string(grid.n_rows) + "\n";
  out += "xllcorner ";
  append_double(out, grid.x_origin);
  out += "\nyllcorner ";
  append_double(out, grid.y_origin);
  out += "\ncellsize ";
  append_double(out, grid.cell_size);
  out += "\nnodata_value ";
  append_double(out, grid.nodata);
  out += "\n";
  for (int r = grid.n_rows - 1; r >= 0; --r) {
    for (int c = 0; c < grid.n_cols; ++c) {
      if (c) out += ' ';
      append_double(out, grid.at({c, r}));
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("write failed: " + path.string());
}

}  // namespace lpsim
