#include "lpsim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "lpsim/error.hpp"
#include "lpsim/manifest.hpp"
#include "lpsim/path_graph.hpp"
#include "lpsim/text_io.hpp"
#include "lpsim/viewshed.hpp"

namespace lpsim {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Stream-id namespace for the sample stage, disjoint from the simulate
// stage's path ids [0, n_gen) and its anchor id 2^64-1.
constexpr std::uint64_t kSampleStreamBase = 0x4000000000000000ull;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Manifest start_manifest(const std::string& command, const Config& cfg, std::uint64_t seed) {
  cfg.validate_keys();
  Manifest m;
  m.command = command;
  m.seed = seed;
  m.config_hash = fnv1a_hex(cfg.canonical_text());
  for (const auto& [k, v] : cfg.entries()) m.config_entries.emplace_back(k, v);
  return m;
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::exists(p)) {
    throw MissingInputError(std::string(what) + " not found: " + p.string());
  }
}

fs::path prepare_out_dir(const fs::path& out_dir) {
  fs::create_directories(out_dir);
  return out_dir;
}

ViewshedWeights weights_for(const Config& cfg) {
  const std::string file = cfg.get_string("viewshed_weights_file", "");
  if (file.empty()) return default_viewshed_weights();
  require_file(file, "viewshed weights file");
  return load_viewshed_weights(file);
}

int resolve_workers(const Params& p, std::size_t jobs) {
  int w = p.workers > 0 ? p.workers
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(w),
                                                std::max<std::size_t>(jobs, 1)));
}

}  // namespace

UpsampleResult run_upsample(const fs::path& heatmap_file, const Config& cfg, std::uint64_t seed,
                            const fs::path& out_dir) {
  const auto t0 = Clock::now();
  require_file(heatmap_file, "heatmap raster");
  prepare_out_dir(out_dir);
  Manifest manifest = start_manifest("upsample-pls " + heatmap_file.string(), cfg, seed);
  manifest.add_input(heatmap_file);
  const Params params = Params::from_config(cfg);

  const RasterGrid heatmap = load_raster(heatmap_file);
  const auto t_train = Clock::now();
  UpsampleResult res;
  res.model = train_gp(heatmap, GPTrainConfig::from_params(params));
  manifest.timings_sec.emplace_back("train", seconds_since(t_train));

  const auto t_post = Clock::now();
  res.posterior = posterior_grid(res.model, params.gp_out_cell_size_m);
  manifest.timings_sec.emplace_back("posterior", seconds_since(t_post));

  res.posterior_file = out_dir / "pls_posterior.asc";
  res.model_file = out_dir / "gp_model.txt";
  save_raster(res.posterior, res.posterior_file);
  save_gp_model(res.model, res.model_file, heatmap_file);
  manifest.add_output(res.posterior_file);
  manifest.add_output(res.model_file);
  manifest.timings_sec.emplace_back("total", seconds_since(t0));
  manifest.write(out_dir / "manifest_upsample.txt");
  return res;
}

SimulateResult run_simulate(const fs::path& terrain_dir, const fs::path& network_file,
                            const fs::path& posterior_file, const Config& cfg, std::uint64_t seed,
                            const fs::path& out_dir) {
  const auto t0 = Clock::now();
  require_file(terrain_dir, "terrain directory");
  require_file(network_file, "path network");
  require_file(posterior_file, "start-location posterior");
  prepare_out_dir(out_dir);
  Manifest manifest = start_manifest("simulate " + terrain_dir.string(), cfg, seed);
  manifest.add_input(network_file);
  manifest.add_input(posterior_file);
  const Params params = Params::from_config(cfg);

  const TerrainStack terrain = load_terrain(terrain_dir);
  const PathGraph graph = load_path_network(network_file, params.snap_tolerance_m);
  const EdgeSpatialIndex index(graph);
  const ViewshedWeights weights = weights_for(cfg);
  const RasterGrid posterior = load_raster(posterior_file);

  SimContext ctx;
  ctx.terrain = &terrain;
  ctx.graph = &graph;
  ctx.index = &index;
  ctx.weights = &weights;
  ctx.params = params;

  const auto t_mc = Clock::now();
  SimulateResult res;
  res.paths = run_monte_carlo(ctx, posterior, seed);
  manifest.timings_sec.emplace_back("monte_carlo", seconds_since(t_mc));

  res.paths_file = out_dir / "paths.txt";
  write_paths(res.paths, res.paths_file);
  manifest.add_output(res.paths_file);
  manifest.timings_sec.emplace_back("total", seconds_since(t0));
  manifest.write(out_dir / "manifest_simulate.txt");
  return res;
}

SampleResult run_sample(const fs::path& paths_file, const fs::path& template_file,
                        const Config& cfg, std::uint64_t seed, const fs::path& out_dir,
                        std::optional<BehaviorKind> behavior_filter) {
  const auto t0 = Clock::now();
  require_file(paths_file, "path collection");
  require_file(template_file, "template raster");
  prepare_out_dir(out_dir);
  Manifest manifest = start_manifest("sample " + paths_file.string(), cfg, seed);
  manifest.add_input(paths_file);
  manifest.add_input(template_file);
  const Params params = Params::from_config(cfg);

  std::vector<SimulatedPath> paths = read_paths(paths_file);
  if (behavior_filter) {
    std::erase_if(paths,
                  [&](const SimulatedPath& p) { return p.behavior != *behavior_filter; });
  }
  if (paths.empty()) throw EmptyInputError("no paths to sample in " + paths_file.string());
  const RasterGrid tmpl = load_raster(template_file);
  const MobilityModel model = MobilityModel::from_params(params);

  // Per-path sampling on derived streams; worker count never changes output.
  const auto t_sample = Clock::now();
  std::vector<std::vector<FoundSample>> per_path(paths.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= paths.size()) return;
      try {
        RngStream rng = RngStream::derive(
            seed, kSampleStreamBase + static_cast<std::uint64_t>(paths[i].index));
        per_path[i] = sample_found(paths[i], model, params.m_samples, rng);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int n_workers = resolve_workers(params, paths.size());
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  manifest.timings_sec.emplace_back("sample", seconds_since(t_sample));

  SampleResult res;
  std::size_t total = 0;
  for (const auto& v : per_path) total += v.size();
  res.samples.reserve(total);
  for (const auto& v : per_path) res.samples.insert(res.samples.end(), v.begin(), v.end());
  if (res.samples.empty()) {
    throw EmptyInputError("every mobility draw overshot its path; nothing to bin");
  }

  res.pdm = build_pdm(res.samples, tmpl, params.pdm_cell_size_m);
  res.pdm.config_hash = manifest.config_hash;

  res.samples_file = out_dir / "samples.txt";
  res.pdm_file = out_dir / "pdm.asc";
  res.pdm_log_file = out_dir / "pdm_log.asc";
  write_samples(res.samples, res.samples_file);
  save_raster(res.pdm.grid, res.pdm_file);
  save_raster(log_view(res.pdm.grid), res.pdm_log_file);
  manifest.add_output(res.samples_file);
  manifest.add_output(res.pdm_file);
  manifest.add_output(res.pdm_log_file);
  manifest.timings_sec.emplace_back("total", seconds_since(t0));
  manifest.write(out_dir / "manifest_sample.txt");
  return res;
}

PdmResult run_pdm(const fs::path& samples_file, const fs::path& template_file, const Config& cfg,
                  std::uint64_t seed, const fs::path& out_dir) {
  const auto t0 = Clock::now();
  require_file(samples_file, "samples file");
  require_file(template_file, "template raster");
  prepare_out_dir(out_dir);
  Manifest manifest = start_manifest("pdm " + samples_file.string(), cfg, seed);
  manifest.add_input(samples_file);
  manifest.add_input(template_file);
  const Params params = Params::from_config(cfg);

  const std::vector<FoundSample> samples = read_samples(samples_file);
  if (samples.empty()) throw EmptyInputError("samples file is empty: " + samples_file.string());
  const RasterGrid tmpl = load_raster(template_file);

  PdmResult res;
  res.pdm = build_pdm(samples, tmpl, params.pdm_cell_size_m);
  res.pdm.config_hash = manifest.config_hash;
  res.pdm_file = out_dir / "pdm.asc";
  res.pdm_log_file = out_dir / "pdm_log.asc";
  save_raster(res.pdm.grid, res.pdm_file);
  save_raster(log_view(res.pdm.grid), res.pdm_log_file);
  manifest.add_output(res.pdm_file);
  manifest.add_output(res.pdm_log_file);
  manifest.timings_sec.emplace_back("total", seconds_since(t0));
  manifest.write(out_dir / "manifest_pdm.txt");
  return res;
}

EvaluateResult run_evaluate(const fs::path& samples_file, const fs::path& terrain_dir,
                            const fs::path& network_file, const fs::path& reference_file,
                            const Config& cfg, std::uint64_t seed, const fs::path& out_dir) {
  const auto t0 = Clock::now();
  require_file(samples_file, "samples file");
  require_file(terrain_dir, "terrain directory");
  require_file(network_file, "path network");
  require_file(reference_file, "reference histogram");
  prepare_out_dir(out_dir);
  Manifest manifest = start_manifest("evaluate " + samples_file.string(), cfg, seed);
  manifest.add_input(samples_file);
  manifest.add_input(network_file);
  manifest.add_input(reference_file);
  const Params params = Params::from_config(cfg);

  const std::vector<FoundSample> samples = read_samples(samples_file);
  if (samples.empty()) throw EmptyInputError("samples file is empty: " + samples_file.string());
  const TerrainStack terrain = load_terrain(terrain_dir);
  const PathGraph graph = load_path_network(network_file, params.snap_tolerance_m);
  const CategoryHistogram reference = load_category_histogram(reference_file);

  const auto t_classify = Clock::now();
  EvaluateResult res;
  FoundClassifier classifier(terrain, graph);
  for (const FoundSample& s : samples) res.found.add(classifier(s.position));
  manifest.timings_sec.emplace_back("classify", seconds_since(t_classify));

  res.report = compare_to_reference(res.found, reference);
  res.report_file = out_dir / "evaluation.txt";
  res.histogram_file = out_dir / "found_categories.txt";
  res.report.write(res.report_file);
  save_category_histogram(res.found, res.histogram_file);
  manifest.add_output(res.report_file);
  manifest.add_output(res.histogram_file);
  manifest.timings_sec.emplace_back("total", seconds_since(t0));
  manifest.write(out_dir / "manifest_evaluate.txt");
  return res;
}

FitMobilityResult run_fit_mobility(const fs::path& histogram_file, const Config& cfg,
                                   std::uint64_t seed, const fs::path& out_dir) {
  const auto t0 = Clock::now();
  require_file(histogram_file, "mobility histogram");
  prepare_out_dir(out_dir);
  Manifest manifest = start_manifest("fit-mobility " + histogram_file.string(), cfg, seed);
  manifest.add_input(histogram_file);
  const Params params = Params::from_config(cfg);

  const std::vector<HistogramBin> bins = load_histogram(histogram_file);
  FitMobilityResult res;
  res.model = fit_mobility(bins);
  res.model.speed_kmh = params.speed_kmh;

  std::vector<double> counts;
  counts.reserve(bins.size());
  for (const HistogramBin& b : bins) counts.push_back(b.count);
  res.skl_score = skl(counts, bin_masses(bins, res.model));

  res.model_file = out_dir / "mobility_model.txt";
  std::string text;
  text += "shape " + format_double(res.model.s) + "\n";
  text += "loc_h " + format_double(res.model.mu_loc_h) + "\n";
  text += "scale_h " + format_double(res.model.lambda_scale_h) + "\n";
  text += "speed_kmh " + format_double(res.model.speed_kmh) + "\n";
  text += "fit_skl " + format_double(res.skl_score) + "\n";
  text += "mean_h " + format_double(lognormal_mean(res.model)) + "\n";
  {
    std::ofstream f(res.model_file, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + res.model_file.string());
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw Error("write failed: " + res.model_file.string());
  }
  manifest.add_output(res.model_file);
  manifest.timings_sec.emplace_back("total", seconds_since(t0));
  manifest.write(out_dir / "manifest_fit_mobility.txt");
  return res;
}

}  // namespace lpsim
