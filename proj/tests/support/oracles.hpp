// Independent reference implementations used to cross-check the library.
// Everything here is written from the documented contracts, deliberately
// naive and separate from the production code paths.

#ifndef LPSIM_TESTS_ORACLES_HPP
#define LPSIM_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lpsim/geometry.hpp"
#include "lpsim/path_graph.hpp"
#include "lpsim/raster.hpp"
#include "lpsim/terrain.hpp"
#include "lpsim/viewshed.hpp"

namespace oracles {

// ---------------------------------------------------------------- statistics

// z quantile at 0.99.
inline constexpr double kZ99 = 2.3263478740408408;

// Chi-square critical value at alpha = 0.01. df = 3 uses the tabulated
// value; other df use the Wilson-Hilferty approximation.
inline double chi2_crit_01(int df) {
  if (df == 3) return 11.3449;
  const double d = static_cast<double>(df);
  const double t = 1.0 - 2.0 / (9.0 * d) + kZ99 * std::sqrt(2.0 / (9.0 * d));
  return d * t * t * t;
}

// Pearson chi-square statistic for observed counts against expected
// probabilities (expected counts = p * n).
inline double chi2_stat(std::span<const double> observed, std::span<const double> probs) {
  double n = 0.0;
  for (const double o : observed) n += o;
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probs[i] * n;
    if (e > 0.0) stat += (observed[i] - e) * (observed[i] - e) / e;
  }
  return stat;
}

// One-sample Kolmogorov-Smirnov statistic against a CDF; the alpha = 0.01
// critical value for large n is 1.628 / sqrt(n).
template <typename Cdf>
double ks_stat(std::vector<double> draws, Cdf cdf) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = cdf(draws[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

inline double ks_crit_01(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

// ------------------------------------------------------------ Matern by K_nu

// General Matern covariance evaluated through the modified Bessel function:
//   k = os * 2^(1-nu)/Gamma(nu) * (sqrt(2 nu) r)^nu * K_nu(sqrt(2 nu) r).
inline double matern_general(double r, double nu, double output_scale) {
  if (r <= 0.0) return output_scale;
  const double arg = std::sqrt(2.0 * nu) * r;
  return output_scale * std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(arg, nu) *
         std::cyl_bessel_k(nu, arg);
}

// --------------------------------------------------------------- line of sight

// Naive per-cell recomputation of the documented visibility rule: candidate
// cells lie within `radius` of the observer's cell center, the observer's
// cell is always visible, nodata cells never are, and a target is visible
// unless any interpolated terrain sample strictly exceeds the sightline at
// one of the n-1 interior samples t = i/n, n = ceil(dist / (cell_size/2)),
// of the segment from observer eye (dem + eye_height) to target ground.
// Samples over nodata are skipped.
inline bool los_visible(const lpsim::RasterGrid& dem, lpsim::CellIndex obs,
                        lpsim::CellIndex tgt, double eye_height) {
  if (dem.is_nodata_at(tgt)) return false;
  if (obs.col == tgt.col && obs.row == tgt.row) return true;
  const lpsim::Vec2 a = dem.cell_center(obs);
  const lpsim::Vec2 b = dem.cell_center(tgt);
  const double dist = lpsim::distance(a, b);
  const double z_obs = dem.at(obs) + eye_height;
  const double z_tgt = dem.at(tgt);
  const int n = static_cast<int>(std::ceil(dist / (dem.cell_size / 2.0)));
  for (int i = 1; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    const lpsim::Vec2 q{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
    const double sight = z_obs + (z_tgt - z_obs) * t;
    const auto ground = dem.interpolate(q);
    if (ground && *ground > sight) return false;
  }
  return true;
}

// Full-grid brute-force viewshed over the same rule.
inline std::vector<lpsim::CellIndex> brute_viewshed(const lpsim::RasterGrid& dem,
                                                    lpsim::CellIndex obs, double radius,
                                                    double eye_height) {
  std::vector<lpsim::CellIndex> visible;
  const lpsim::Vec2 c = dem.cell_center(obs);
  for (int row = 0; row < dem.n_rows; ++row) {
    for (int col = 0; col < dem.n_cols; ++col) {
      const lpsim::CellIndex cell{col, row};
      if (lpsim::distance(dem.cell_center(cell), c) > radius) continue;
      if (los_visible(dem, obs, cell, eye_height)) visible.push_back(cell);
    }
  }
  return visible;
}

// ------------------------------------------------------------- nearest edges

// Exhaustive nearest-k scan: every edge, every segment, first minimum in
// polyline order within an edge, then sorted by (distance, edge id).
inline std::vector<lpsim::NearestEdge> brute_nearest_k(const lpsim::PathGraph& graph,
                                                       lpsim::Vec2 p, int k) {
  std::vector<lpsim::NearestEdge> all;
  for (const lpsim::PathEdge& e : graph.all_edges()) {
    if (!e.active) continue;
    double best = std::numeric_limits<double>::infinity();
    lpsim::NearestEdge ne;
    double along_base = 0.0;
    for (std::size_t s = 0; s + 1 < e.polyline.size(); ++s) {
      const lpsim::Vec2 a = e.polyline[s];
      const lpsim::Vec2 b = e.polyline[s + 1];
      const lpsim::Vec2 ab = b - a;
      const double len2 = lpsim::dot(ab, ab);
      double t = len2 > 0.0 ? lpsim::dot(p - a, ab) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const lpsim::Vec2 q{a.x + ab.x * t, a.y + ab.y * t};
      const double dist = lpsim::distance(p, q);
      if (dist < best) {
        best = dist;
        ne = {e.id, q, dist, along_base + t * std::sqrt(len2), e.score};
      }
      along_base += std::sqrt(len2);
    }
    if (std::isfinite(best)) all.push_back(ne);
  }
  std::sort(all.begin(), all.end(), [](const lpsim::NearestEdge& x, const lpsim::NearestEdge& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    return x.edge_id < y.edge_id;
  });
  if (static_cast<int>(all.size()) > k) all.resize(static_cast<std::size_t>(k));
  return all;
}

// ------------------------------------------------------------ classification

// Found-category rule, re-stated with local segment math: road when within
// one cell size of an active edge; else water when the water surface is
// lake (1), sea (2) or river (3) or the land cover is water (13); building
// on urban (12); trees on woodland (14); open ground otherwise.
inline lpsim::FoundCategory classify_reference(lpsim::Vec2 p, const lpsim::TerrainStack& terrain,
                                               const lpsim::PathGraph& graph) {
  auto seg_dist = [](lpsim::Vec2 q, lpsim::Vec2 a, lpsim::Vec2 b) {
    const lpsim::Vec2 ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    double t = len2 > 0.0 ? ((q.x - a.x) * ab.x + (q.y - a.y) * ab.y) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(q.x - (a.x + ab.x * t), q.y - (a.y + ab.y * t));
  };
  bool near_road = false;
  for (const lpsim::PathEdge& e : graph.all_edges()) {
    if (!e.active) continue;
    for (std::size_t s = 0; s + 1 < e.polyline.size() && !near_road; ++s) {
      if (seg_dist(p, e.polyline[s], e.polyline[s + 1]) <= terrain.cell_size()) near_road = true;
    }
    if (near_road) break;
  }
  if (near_road) return lpsim::FoundCategory::road;
  const auto cell = terrain.land_cover.cell_at(p);
  if (!cell) return lpsim::FoundCategory::open_ground;
  const double ws = terrain.water_surface.at(*cell);
  if (!terrain.water_surface.is_nodata(ws)) {
    const int w = static_cast<int>(ws);
    if (w == 1 || w == 2 || w == 3) return lpsim::FoundCategory::water;
  }
  const double lc = terrain.land_cover.at(*cell);
  if (terrain.land_cover.is_nodata(lc)) return lpsim::FoundCategory::open_ground;
  switch (static_cast<int>(lc)) {
    case 13: return lpsim::FoundCategory::water;
    case 12: return lpsim::FoundCategory::building;
    case 14: return lpsim::FoundCategory::trees;
    default: return lpsim::FoundCategory::open_ground;
  }
}

// ----------------------------------------------------------------- plain SKL

// Direct per-term summation with the same eps = 1e-9 smoothing convention.
inline double skl_reference(std::span<const double> p_counts, std::span<const double> q_counts) {
  auto normalize = [](std::span<const double> c) {
    double t = 0.0;
    for (const double v : c) t += v;
    std::vector<double> p(c.begin(), c.end());
    for (double& v : p) v /= t;
    bool any_zero = false;
    for (double& v : p) {
      if (v == 0.0) {
        v = 1e-9;
        any_zero = true;
      }
    }
    if (any_zero) {
      double t2 = 0.0;
      for (const double v : p) t2 += v;
      for (double& v : p) v /= t2;
    }
    return p;
  };
  const std::vector<double> p = normalize(p_counts);
  const std::vector<double> q = normalize(q_counts);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    a += p[i] * std::log(p[i] / q[i]);
    b += q[i] * std::log(q[i] / p[i]);
  }
  return a + b;
}

}  // namespace oracles

#endif
