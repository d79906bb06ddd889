#ifndef LPSIM_CONFIG_HPP
#define LPSIM_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lpsim {

// Plain-text `key = value` configuration. '#' starts a comment. Flag
// overrides win over file values; everything lands in the run manifest.
class Config {
public:
  Config() = default;

  static Config from_file(const std::filesystem::path& path);
  static Config from_text(const std::string& text, const std::string& origin = "<text>");

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  // Sorted `key=value` lines; input to the config hash.
  std::string canonical_text() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  // Throws ConfigError if any key is not in the known-key registry.
  void validate_keys() const;

private:
  std::map<std::string, std::string> entries_;
};

// Behavior mix as normalized probabilities, fixed order.
struct BehaviorMix {
  double paths = 42.0 / 77.0;
  double buildings = 30.0 / 77.0;
  double trees = 4.0 / 77.0;
  double water = 1.0 / 77.0;
};

// Every tunable with its default. Defaults follow the solo-hiker profile.
struct Params {
  // grid / agent
  double cell_size_m = 5.0;
  double d_max_m = 10000.0;
  double eye_height_m = 1.6;

  // behavior mix weights (relative counts; normalized before use)
  double mix_paths = 42.0;
  double mix_buildings = 30.0;
  double mix_trees = 4.0;
  double mix_water = 1.0;

  // head-to-water
  double catchment_bound = 8000.0;

  // head-to-paths
  int lambda_max = 5;
  int k_nearest = 3;
  double snap_tolerance_m = 0.5;

  // viewshed behaviors
  double viewshed_radius_m = 300.0;
  int viewshed_cadence_steps = 10;

  // start model
  double sigma_xx = 10000.0;
  double sigma_xy = 0.0;
  double sigma_yy = 10000.0;
  int start_max_rejects = 10000;
  int paths_per_start = 200;

  // monte carlo
  int n_gen = 1000;
  int workers = 0;  // 0 = hardware concurrency

  // mobility-time sampling
  double speed_kmh = 3.87;
  double mobility_shape = 0.8;
  double mobility_loc_h = 0.0;
  double mobility_scale_h = 0.77;
  int m_samples = 820;

  // pdm
  double pdm_cell_size_m = 0.0;  // 0 = same as the template raster

  // gp upsampling
  int gp_iters = 500;
  double gp_lr = 0.05;
  double gp_noise_init = 0.1;
  double gp_length_scale_init = 0.2;
  double gp_output_scale_init = 1.0;
  double gp_jitter = 1e-8;
  int gp_exact_max_points = 4096;
  int gp_inducing_per_dim = 40;
  double gp_out_cell_size_m = 20.0;

  static Params from_config(const Config& cfg);
  BehaviorMix mix() const;
};

}  // namespace lpsim

#endif
