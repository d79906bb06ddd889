#ifndef LPSIM_GP_HPP
#define LPSIM_GP_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "lpsim/config.hpp"
#include "lpsim/raster.hpp"
#include "lpsim/rng.hpp"

namespace lpsim {

// Affine maps used to bring a heatmap into unit scale and back.
struct NormalizationRecord {
  double z_min = 0.0, z_max = 1.0;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  bool constant_input = false;

  double norm_x(double x) const { return (x - x_min) / (x_max - x_min); }
  double norm_y(double y) const { return (y - y_min) / (y_max - y_min); }
  double denorm_z(double z) const { return z_min + z * (z_max - z_min); }
};

struct NormalizedHeatmap {
  RasterGrid grid;  // same layout as the source; nodata preserved
  NormalizationRecord record;
};

// Unit-scale normalization: z+ = (z - min)/(max - min), x and y mapped the
// same way over the grid's cell-center extent. A constant input maps to 0.5
// everywhere (flagged and warned). Empty or all-nodata input is an error.
NormalizedHeatmap normalize_heatmap(const RasterGrid& raw);

// Inverse of normalize_heatmap on the values (for round-trip checks).
RasterGrid denormalize_heatmap(const NormalizedHeatmap& h);

// Matern-5/2 covariance with per-dimension length scales:
//   k = output_scale * (1 + sqrt5 r + 5/3 r^2) exp(-sqrt5 r),
//   r^2 = ((ax-bx)/ls.x)^2 + ((ay-by)/ls.y)^2.
double matern25(Vec2 a, Vec2 b, Vec2 length_scale, double output_scale);

// Sparse cubic-convolution interpolation weights onto the m x m inducing
// lattice spanning [lo, hi] per dimension: up to 16 (flat index, weight)
// pairs with index = iy * m + ix. Weights sum to 1. Throws if the query
// leaves the lattice's interior hull.
std::vector<std::pair<int, double>> kiss_interp_weights(Vec2 q, int m, double lo, double hi);

// The interpolated kernel w_a^T K_UU w_b the KISS approximation induces.
double kiss_approx_kernel(Vec2 a, Vec2 b, int m, double lo, double hi, Vec2 length_scale,
                          double output_scale);

// Exact marginal log likelihood of a zero-mean GP (and its gradient with
// respect to log length_scale.x, log length_scale.y, log output_scale,
// log noise_variance). Dense; intended for moderate point counts and as the
// optimizer's objective and test oracle hook.
double gp_mll(std::span<const Vec2> points, std::span<const double> targets, Vec2 length_scale,
              double output_scale, double noise_variance, double jitter);
std::pair<double, std::array<double, 4>> gp_mll_and_grad(std::span<const Vec2> points,
                                                         std::span<const double> targets,
                                                         Vec2 length_scale, double output_scale,
                                                         double noise_variance, double jitter);

struct GPTrainConfig {
  int iters = 500;
  double lr = 0.05;
  double noise_init = 0.1;  // initial noise variance
  double length_scale_init = 0.2;
  double output_scale_init = 1.0;
  double jitter = 1e-8;
  int exact_max_points = 4096;  // KISS approximation above this
  int inducing_per_dim = 40;

  static GPTrainConfig from_params(const Params& p);
};

// Inducing lattice bounds in normalized units; padded past [0, 1] so
// posterior queries at finer resolutions remain inside the interior hull.
inline constexpr double kLatticeLo = -0.125;
inline constexpr double kLatticeHi = 1.125;

struct GPModel {
  bool trained = false;
  bool used_kiss = false;
  Vec2 length_scale{0.2, 0.2};
  double output_scale = 1.0;
  double noise_variance = 0.1;
  double final_mll = 0.0;
  std::vector<double> accepted_mll;  // non-decreasing by construction
  NormalizationRecord record;

  // training grid geometry (world units) for posterior output
  int n_cols = 0, n_rows = 0;
  double cell_size = 0.0, x0 = 0.0, y0 = 0.0;

  // prediction state
  std::vector<Vec2> points;    // normalized training inputs (exact mode)
  std::vector<double> alpha;   // exact: K^-1 y
  int lattice_m = 0;           // KISS mode
  std::vector<double> kiss_v;  // KISS: K_UU W^T alpha

  // Posterior mean in normalized units at a normalized query point.
  double predict_norm(Vec2 q) const;
  // Posterior mean in heatmap value units at a world point.
  double predict_world(Vec2 p) const;
};

// Fits hyperparameters by Adam ascent on the exact MLL (KISS-approximated
// kernel above exact_max_points). A proposal producing a non-finite MLL is
// retried with a halved step up to 5 times, then the run fails; iterations
// that do not improve the best MLL keep the optimizer moving but are not
// recorded as accepted. Deterministic.
GPModel train_gp(const RasterGrid& heatmap, const GPTrainConfig& cfg);

// Posterior mean over the training extent at the requested resolution,
// denormalized and floored at 0.
RasterGrid posterior_grid(const GPModel& model, double out_cell_size);

// Draws n positions from the grid treated as a discrete distribution over
// cell centers (nodata and non-positive cells carry no mass).
std::vector<Vec2> sample_pls(const RasterGrid& grid, int n, RngStream& rng);

// Plain-text hyperparameters plus a checksummed reference to the training
// input.
void save_gp_model(const GPModel& model, const std::filesystem::path& out,
                   const std::filesystem::path& training_ref);

}  // namespace lpsim

#endif
