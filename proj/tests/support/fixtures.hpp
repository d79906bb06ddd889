// Small in-memory terrains, temp directories and file helpers shared by the
// test suites.

#ifndef LPSIM_TESTS_FIXTURES_HPP
#define LPSIM_TESTS_FIXTURES_HPP

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lpsim/raster.hpp"
#include "lpsim/terrain.hpp"

#ifndef LPSIM_DATA_DIR
#error "LPSIM_DATA_DIR must be defined by the build"
#endif

namespace fixtures {

inline std::filesystem::path data_dir() { return std::filesystem::path(LPSIM_DATA_DIR); }

// Unique scratch directory, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    dir_ = std::filesystem::temp_directory_path() /
           ("lpsim-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path file(const std::string& name) const { return dir_ / name; }

private:
  std::filesystem::path dir_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Flat all-land terrain: constant elevation, improved grassland, catchment
// 10, no water surface, outflow pointing east.
inline lpsim::TerrainStack flat_terrain(int n, double cell_size = 5.0, double elevation = 10.0,
                                        lpsim::Vec2 origin = {0.0, 0.0}) {
  lpsim::TerrainStack t;
  t.dem = lpsim::RasterGrid::filled(n, n, cell_size, origin, elevation);
  t.land_cover = lpsim::RasterGrid::filled(
      n, n, cell_size, origin, static_cast<double>(lpsim::LandCover::improved_grassland));
  t.catchment = lpsim::RasterGrid::filled(n, n, cell_size, origin, 10.0);
  t.water_surface = lpsim::RasterGrid::filled(n, n, cell_size, origin,
                                              static_cast<double>(lpsim::WaterSurface::none));
  t.outflow_dir = lpsim::RasterGrid::filled(n, n, cell_size, origin, 0.0);
  return t;
}

}  // namespace fixtures

#endif
