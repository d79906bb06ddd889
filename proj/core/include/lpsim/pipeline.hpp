#ifndef LPSIM_PIPELINE_HPP
#define LPSIM_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "lpsim/config.hpp"
#include "lpsim/gp.hpp"
#include "lpsim/metrics.hpp"
#include "lpsim/sampling.hpp"
#include "lpsim/simulation.hpp"

namespace lpsim {

// One reusable stage per CLI subcommand. Every stage validates the config's
// keys, writes its data outputs plus a manifest_<stage>.txt into out_dir, and
// is byte-deterministic in (inputs, config, seed) — manifests record stage
// timings and are the one output excluded from that guarantee.

struct UpsampleResult {
  GPModel model;
  RasterGrid posterior;
  std::filesystem::path posterior_file;  // pls_posterior.asc
  std::filesystem::path model_file;      // gp_model.txt
};
UpsampleResult run_upsample(const std::filesystem::path& heatmap_file, const Config& cfg,
                            std::uint64_t seed, const std::filesystem::path& out_dir);

struct SimulateResult {
  std::vector<SimulatedPath> paths;
  std::filesystem::path paths_file;  // paths.txt
};
SimulateResult run_simulate(const std::filesystem::path& terrain_dir,
                            const std::filesystem::path& network_file,
                            const std::filesystem::path& posterior_file, const Config& cfg,
                            std::uint64_t seed, const std::filesystem::path& out_dir);

struct SampleResult {
  std::vector<FoundSample> samples;
  PDM pdm;
  std::filesystem::path samples_file;  // samples.txt
  std::filesystem::path pdm_file;      // pdm.asc
  std::filesystem::path pdm_log_file;  // pdm_log.asc
};
// template_file fixes the PDM extent (normally the terrain DEM). Paths are
// sampled in parallel on per-path derived streams, so results do not depend
// on the worker count. behavior_filter restricts sampling to paths of one
// behavior.
SampleResult run_sample(const std::filesystem::path& paths_file,
                        const std::filesystem::path& template_file, const Config& cfg,
                        std::uint64_t seed, const std::filesystem::path& out_dir,
                        std::optional<BehaviorKind> behavior_filter = {});

struct PdmResult {
  PDM pdm;
  std::filesystem::path pdm_file;      // pdm.asc
  std::filesystem::path pdm_log_file;  // pdm_log.asc
};
// Re-bins an existing samples file (the sample stage already writes a PDM;
// this recombines at a different resolution or extent without resampling).
PdmResult run_pdm(const std::filesystem::path& samples_file,
                  const std::filesystem::path& template_file, const Config& cfg,
                  std::uint64_t seed, const std::filesystem::path& out_dir);

struct EvaluateResult {
  CategoryHistogram found;
  ComparisonReport report;
  std::filesystem::path report_file;     // evaluation.txt
  std::filesystem::path histogram_file;  // found_categories.txt
};
EvaluateResult run_evaluate(const std::filesystem::path& samples_file,
                            const std::filesystem::path& terrain_dir,
                            const std::filesystem::path& network_file,
                            const std::filesystem::path& reference_file, const Config& cfg,
                            std::uint64_t seed, const std::filesystem::path& out_dir);

struct FitMobilityResult {
  MobilityModel model;
  double skl_score = 0.0;
  std::filesystem::path model_file;  // mobility_model.txt
};
FitMobilityResult run_fit_mobility(const std::filesystem::path& histogram_file, const Config& cfg,
                                   std::uint64_t seed, const std::filesystem::path& out_dir);

}  // namespace lpsim

#endif
