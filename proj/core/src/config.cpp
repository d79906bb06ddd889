#include "lpsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "lpsim/error.hpp"

namespace lpsim {

namespace {

const char* const kKnownKeys[] = {
    "cell_size_m", "d_max_m", "eye_height_m",
    "mix_paths", "mix_buildings", "mix_trees", "mix_water",
    "catchment_bound",
    "lambda_max", "k_nearest", "snap_tolerance_m",
    "viewshed_radius_m", "viewshed_cadence_steps",
    "sigma_xx", "sigma_xy", "sigma_yy", "start_max_rejects", "paths_per_start",
    "n_gen", "workers", "seed",
    "speed_kmh", "mobility_shape", "mobility_loc_h", "mobility_scale_h", "m_samples",
    "pdm_cell_size_m",
    "gp_iters", "gp_lr", "gp_noise_init", "gp_length_scale_init", "gp_output_scale_init",
    "gp_jitter", "gp_exact_max_points", "gp_inducing_per_dim", "gp_out_cell_size_m",
    "viewshed_weights_file",
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path.string());
}

Config Config::from_text(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    cfg.entries_[key] = value;
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': invalid number '" + v + "'");
  }
  return out;
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': invalid integer '" + v + "'");
  }
  return out;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': invalid unsigned integer '" + v + "'");
  }
  return out;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

std::string Config::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

void Config::validate_keys() const {
  for (const auto& [k, v] : entries_) {
    bool known = false;
    for (const char* kk : kKnownKeys) {
      if (k == kk) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown config key '" + k + "'");
  }
}

Params Params::from_config(const Config& cfg) {
  cfg.validate_keys();
  Params p;
  p.cell_size_m = cfg.get_double("cell_size_m", p.cell_size_m);
  p.d_max_m = cfg.get_double("d_max_m", p.d_max_m);
  p.eye_height_m = cfg.get_double("eye_height_m", p.eye_height_m);
  p.mix_paths = cfg.get_double("mix_paths", p.mix_paths);
  p.mix_buildings = cfg.get_double("mix_buildings", p.mix_buildings);
  p.mix_trees = cfg.get_double("mix_trees", p.mix_trees);
  p.mix_water = cfg.get_double("mix_water", p.mix_water);
  p.catchment_bound = cfg.get_double("catchment_bound", p.catchment_bound);
  p.lambda_max = cfg.get_int("lambda_max", p.lambda_max);
  p.k_nearest = cfg.get_int("k_nearest", p.k_nearest);
  p.snap_tolerance_m = cfg.get_double("snap_tolerance_m", p.snap_tolerance_m);
  p.viewshed_radius_m = cfg.get_double("viewshed_radius_m", p.viewshed_radius_m);
  p.viewshed_cadence_steps = cfg.get_int("viewshed_cadence_steps", p.viewshed_cadence_steps);
  p.sigma_xx = cfg.get_double("sigma_xx", p.sigma_xx);
  p.sigma_xy = cfg.get_double("sigma_xy", p.sigma_xy);
  p.sigma_yy = cfg.get_double("sigma_yy", p.sigma_yy);
  p.start_max_rejects = cfg.get_int("start_max_rejects", p.start_max_rejects);
  p.paths_per_start = cfg.get_int("paths_per_start", p.paths_per_start);
  p.n_gen = cfg.get_int("n_gen", p.n_gen);
  p.workers = cfg.get_int("workers", p.workers);
  p.speed_kmh = cfg.get_double("speed_kmh", p.speed_kmh);
  p.mobility_shape = cfg.get_double("mobility_shape", p.mobility_shape);
  p.mobility_loc_h = cfg.get_double("mobility_loc_h", p.mobility_loc_h);
  p.mobility_scale_h = cfg.get_double("mobility_scale_h", p.mobility_scale_h);
  p.m_samples = cfg.get_int("m_samples", p.m_samples);
  p.pdm_cell_size_m = cfg.get_double("pdm_cell_size_m", p.pdm_cell_size_m);
  p.gp_iters = cfg.get_int("gp_iters", p.gp_iters);
  p.gp_lr = cfg.get_double("gp_lr", p.gp_lr);
  p.gp_noise_init = cfg.get_double("gp_noise_init", p.gp_noise_init);
  p.gp_length_scale_init = cfg.get_double("gp_length_scale_init", p.gp_length_scale_init);
  p.gp_output_scale_init = cfg.get_double("gp_output_scale_init", p.gp_output_scale_init);
  p.gp_jitter = cfg.get_double("gp_jitter", p.gp_jitter);
  p.gp_exact_max_points = cfg.get_int("gp_exact_max_points", p.gp_exact_max_points);
  p.gp_inducing_per_dim = cfg.get_int("gp_inducing_per_dim", p.gp_inducing_per_dim);
  p.gp_out_cell_size_m = cfg.get_double("gp_out_cell_size_m", p.gp_out_cell_size_m);

  if (p.cell_size_m <= 0) throw ConfigError("cell_size_m must be positive");
  if (p.d_max_m < 0) throw ConfigError("d_max_m must be non-negative");
  if (p.n_gen < 1) throw ConfigError("n_gen must be >= 1");
  if (p.lambda_max < 0) throw ConfigError("lambda_max must be >= 0");
  if (p.k_nearest < 1) throw ConfigError("k_nearest must be >= 1");
  if (p.catchment_bound <= 0) throw ConfigError("catchment_bound must be positive");
  if (p.speed_kmh <= 0) throw ConfigError("speed_kmh must be positive");
  if (p.m_samples < 1) throw ConfigError("m_samples must be >= 1");
  if (p.mix_paths < 0 || p.mix_buildings < 0 || p.mix_trees < 0 || p.mix_water < 0 ||
      p.mix_paths + p.mix_buildings + p.mix_trees + p.mix_water <= 0) {
    throw ConfigError("behavior mix weights must be non-negative with a positive sum");
  }
  return p;
}

BehaviorMix Params::mix() const {
  const double total = mix_paths + mix_buildings + mix_trees + mix_water;
  BehaviorMix m;
  m.paths = mix_paths / total;
  m.buildings = mix_buildings / total;
  m.trees = mix_trees / total;
  m.water = mix_water / total;
  return m;
}

}  // namespace lpsim
