// Command line front end for the lost-person simulation pipeline.
//
// Subcommands compose through files: upsample-pls -> simulate -> sample ->
// evaluate, plus pdm (re-binning) and fit-mobility (histogram fitting).
// Every stage writes a manifest next to its outputs; given the same inputs,
// config, and seed, outputs are byte-identical regardless of --workers.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lpsim/behaviors.hpp"
#include "lpsim/config.hpp"
#include "lpsim/error.hpp"
#include "lpsim/pipeline.hpp"

namespace {

struct Args {
  std::string config_file;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = -1;
  std::vector<std::string> overrides;  // key=value

  std::string heatmap;
  std::string terrain;
  std::string network;
  std::string posterior;
  std::string paths;
  std::string tmpl;
  std::string samples;
  std::string reference;
  std::string histogram;
  std::string behavior;
};

lpsim::Config merged_config(const Args& a) {
  lpsim::Config cfg;
  if (!a.config_file.empty()) cfg = lpsim::Config::from_file(a.config_file);
  for (const std::string& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw lpsim::ConfigError("--set expects KEY=VALUE, got: " + kv);
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.workers >= 0) cfg.set("workers", std::to_string(a.workers));
  cfg.validate_keys();
  return cfg;
}

void force_behavior(lpsim::Config& cfg, lpsim::BehaviorKind kind) {
  cfg.set("mix_paths", kind == lpsim::BehaviorKind::head_to_paths ? "1" : "0");
  cfg.set("mix_buildings", kind == lpsim::BehaviorKind::head_to_buildings ? "1" : "0");
  cfg.set("mix_trees", kind == lpsim::BehaviorKind::head_to_trees ? "1" : "0");
  cfg.set("mix_water", kind == lpsim::BehaviorKind::head_to_water ? "1" : "0");
}

int dispatch(const std::string& command, const Args& a) {
  lpsim::Config cfg = merged_config(a);
  const std::uint64_t seed = a.seed_given ? a.seed : cfg.get_u64("seed", 0);

  if (command == "upsample-pls") {
    const auto res = lpsim::run_upsample(a.heatmap, cfg, seed, a.out_dir);
    std::cout << "wrote " << res.posterior_file.string() << " (" << res.posterior.n_cols << "x"
              << res.posterior.n_rows << " cells) and " << res.model_file.string() << "\n";
  } else if (command == "simulate") {
    if (!a.behavior.empty()) force_behavior(cfg, lpsim::parse_behavior(a.behavior));
    const auto res = lpsim::run_simulate(a.terrain, a.network, a.posterior, cfg, seed, a.out_dir);
    std::cout << "wrote " << res.paths_file.string() << " (" << res.paths.size() << " paths)\n";
  } else if (command == "sample") {
    std::optional<lpsim::BehaviorKind> filter;
    if (!a.behavior.empty()) filter = lpsim::parse_behavior(a.behavior);
    const auto res = lpsim::run_sample(a.paths, a.tmpl, cfg, seed, a.out_dir, filter);
    std::cout << "wrote " << res.samples_file.string() << " (" << res.samples.size()
              << " samples), " << res.pdm_file.string() << ", " << res.pdm_log_file.string()
              << "\n";
  } else if (command == "pdm") {
    const auto res = lpsim::run_pdm(a.samples, a.tmpl, cfg, seed, a.out_dir);
    std::cout << "wrote " << res.pdm_file.string() << " and " << res.pdm_log_file.string() << " ("
              << res.pdm.n_samples << " samples binned)\n";
  } else if (command == "evaluate") {
    const auto res =
        lpsim::run_evaluate(a.samples, a.terrain, a.network, a.reference, cfg, seed, a.out_dir);
    std::cout << res.report.text();
    std::cout << "wrote " << res.report_file.string() << "\n";
  } else if (command == "fit-mobility") {
    const auto res = lpsim::run_fit_mobility(a.histogram, cfg, seed, a.out_dir);
    std::cout << "fitted shape=" << res.model.s << " scale_h=" << res.model.lambda_scale_h
              << " (skl " << res.skl_score << "); wrote " << res.model_file.string() << "\n";
  } else {
    throw lpsim::Error("unknown subcommand: " + command);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lost-person movement simulator and probability-map pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  Args a;
  app.add_option("--config", a.config_file, "plain-text key = value configuration file");
  app.add_option("--seed", a.seed, "master RNG seed (wins over the config's seed)")
      ->each([&a](const std::string&) { a.seed_given = true; });
  app.add_option("--workers", a.workers, "worker threads (0 = hardware concurrency)");
  app.add_option("--out-dir", a.out_dir, "directory for outputs and manifests");
  app.add_option("--set", a.overrides, "config override KEY=VALUE (repeatable, wins over file)");

  CLI::App* up = app.add_subcommand("upsample-pls", "fit a GP to a sparse PLS heatmap");
  up->add_option("--heatmap", a.heatmap, "sparse start-location raster")->required();

  CLI::App* sim = app.add_subcommand("simulate", "run the Monte Carlo path generation");
  sim->add_option("--terrain", a.terrain, "directory with the aligned raster stack")->required();
  sim->add_option("--network", a.network, "path/road network JSON")->required();
  sim->add_option("--posterior", a.posterior, "start-location probability raster")->required();
  sim->add_option("--behavior", a.behavior, "force every path to one behavior");

  CLI::App* smp = app.add_subcommand("sample", "sample found locations and build the PDM");
  smp->add_option("--paths", a.paths, "simulated path collection")->required();
  smp->add_option("--template", a.tmpl, "raster fixing the PDM extent")->required();
  smp->add_option("--behavior", a.behavior, "sample only paths of one behavior");

  CLI::App* pdm = app.add_subcommand("pdm", "re-bin an existing samples file");
  pdm->add_option("--samples", a.samples, "found-location samples file")->required();
  pdm->add_option("--template", a.tmpl, "raster fixing the PDM extent")->required();

  CLI::App* ev = app.add_subcommand("evaluate", "compare found categories to a reference");
  ev->add_option("--samples", a.samples, "found-location samples file")->required();
  ev->add_option("--terrain", a.terrain, "directory with the aligned raster stack")->required();
  ev->add_option("--network", a.network, "path/road network JSON")->required();
  ev->add_option("--reference", a.reference, "reference category histogram")->required();

  CLI::App* fit = app.add_subcommand("fit-mobility", "fit the log-normal mobility model");
  fit->add_option("--histogram", a.histogram, "mobility-time histogram file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    return dispatch(app.get_subcommands().front()->get_name(), a);
  } catch (const lpsim::MissingInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const lpsim::AlignmentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const lpsim::EmptyInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const lpsim::CategoryMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
