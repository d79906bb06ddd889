#ifndef LPSIM_SAMPLING_HPP
#define LPSIM_SAMPLING_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lpsim/behaviors.hpp"
#include "lpsim/config.hpp"
#include "lpsim/raster.hpp"
#include "lpsim/rng.hpp"
#include "lpsim/simulation.hpp"

namespace lpsim {

// Three-parameter log-normal mobility time in hours: a draw is
//   t = mu_loc + lambda_scale * exp(s * z),  z ~ N(0, 1),
// i.e. (t - mu_loc) / lambda_scale is standard log-normal with shape s.
// Times convert to along-path distances at a constant walking speed.
struct MobilityModel {
  double s = 0.8;                // shape, dimensionless
  double mu_loc_h = 0.0;         // location offset, hours
  double lambda_scale_h = 0.77;  // scale, hours
  double speed_kmh = 3.87;       // preferred walking speed

  static MobilityModel from_params(const Params& p);
};

// Density of the model at x hours; 0 at or below the support boundary mu_loc.
double lognormal_pdf(double x_h, const MobilityModel& model);
// P(T <= x).
double lognormal_cdf(double x_h, const MobilityModel& model);
// E[T] = mu_loc + lambda_scale * exp(s^2 / 2).
double lognormal_mean(const MobilityModel& model);
// One draw of T.
double sample_time(const MobilityModel& model, RngStream& rng);

struct HistogramBin {
  double center_h = 0.0;
  double count = 0.0;
};

// Fits (s, lambda_scale) with mu_loc fixed at 0 by minimizing the symmetric
// KL divergence between the normalized histogram and the bin-integrated
// model. Deterministic: coarse log-spaced grid search refined by alternating
// golden-section passes per axis. Needs at least 3 nonzero bins.
MobilityModel fit_mobility(std::span<const HistogramBin> bins);

// Bin-integrated model masses over the bins' implied edges (midpoints between
// consecutive centers, end bins extended symmetrically, left edge clamped to
// the support boundary). Shared by the fitter and its tests.
std::vector<double> bin_masses(std::span<const HistogramBin> bins, const MobilityModel& model);

// Plain-text histogram: one "<bin_center_hours> <count>" line each, '#'
// comments allowed.
std::vector<HistogramBin> load_histogram(const std::filesystem::path& file);

// One location where the lost person would be found at the sampled time.
struct FoundSample {
  Vec2 position;
  double time_h = 0.0;
  int path_index = 0;
  BehaviorKind behavior = BehaviorKind::head_to_paths;
};

// Draws m_samples mobility times, converts each to a distance
// d = t * speed * 1000 meters, discards draws whose distance exceeds the
// path's length (never clamps — the discard is what skews retained times
// short), and interpolates the survivors' positions along the polyline.
std::vector<FoundSample> sample_found(const SimulatedPath& path, const MobilityModel& model,
                                      int m_samples, RngStream& rng);

// Normalized probability-distribution map over found locations.
struct PDM {
  RasterGrid grid;            // probabilities, cells >= 0, sum 1
  long long n_samples = 0;    // samples binned (normalization denominator)
  std::string config_hash;    // filled by pipeline runs
};

// Bins sample positions over the template's extent at out_cell_size meters
// (0 uses the template's own cell size) and divides by the binned count.
// Throws EmptyInputError when no sample lands inside the extent.
PDM build_pdm(std::span<const FoundSample> samples, const RasterGrid& tmpl, double out_cell_size);

// Natural log of each positive cell; zero cells become nodata.
RasterGrid log_view(const RasterGrid& pdm_grid);

// Delimited text, one sample per line: <x> <y> <time_h> <behavior> <path_index>
void write_samples(std::span<const FoundSample> samples, const std::filesystem::path& file);
std::vector<FoundSample> read_samples(const std::filesystem::path& file);

}  // namespace lpsim

#endif
