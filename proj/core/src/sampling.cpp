#include "lpsim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lpsim/error.hpp"
#include "lpsim/metrics.hpp"
#include "lpsim/text_io.hpp"

namespace lpsim {

MobilityModel MobilityModel::from_params(const Params& p) {
  MobilityModel m;
  m.s = p.mobility_shape;
  m.mu_loc_h = p.mobility_loc_h;
  m.lambda_scale_h = p.mobility_scale_h;
  m.speed_kmh = p.speed_kmh;
  return m;
}

double lognormal_pdf(double x_h, const MobilityModel& model) {
  const double y = (x_h - model.mu_loc_h) / model.lambda_scale_h;
  if (y <= 0.0) return 0.0;
  const double ln = std::log(y);
  return std::exp(-ln * ln / (2.0 * model.s * model.s)) /
         (y * model.s * std::sqrt(2.0 * M_PI) * model.lambda_scale_h);
}

double lognormal_cdf(double x_h, const MobilityModel& model) {
  const double y = (x_h - model.mu_loc_h) / model.lambda_scale_h;
  if (y <= 0.0) return 0.0;
  return 0.5 * std::erfc(-std::log(y) / (model.s * std::sqrt(2.0)));
}

double lognormal_mean(const MobilityModel& model) {
  return model.mu_loc_h + model.lambda_scale_h * std::exp(0.5 * model.s * model.s);
}

double sample_time(const MobilityModel& model, RngStream& rng) {
  return rng.lognormal(model.s, model.mu_loc_h, model.lambda_scale_h);
}

std::vector<double> bin_masses(std::span<const HistogramBin> bins, const MobilityModel& model) {
  const std::size_t n = bins.size();
  std::vector<double> masses(n, 0.0);
  if (n == 0) return masses;
  for (std::size_t i = 0; i < n; ++i) {
    double left, right;
    if (i == 0) {
      left = n > 1 ? bins[0].center_h - 0.5 * (bins[1].center_h - bins[0].center_h)
                   : bins[0].center_h - 0.5;
    } else {
      left = 0.5 * (bins[i - 1].center_h + bins[i].center_h);
    }
    if (i + 1 < n) {
      right = 0.5 * (bins[i].center_h + bins[i + 1].center_h);
    } else {
      right = n > 1 ? bins[n - 1].center_h + 0.5 * (bins[n - 1].center_h - bins[n - 2].center_h)
                    : bins[n - 1].center_h + 0.5;
    }
    left = std::max(left, model.mu_loc_h);
    right = std::max(right, model.mu_loc_h);
    masses[i] = lognormal_cdf(right, model) - lognormal_cdf(left, model);
  }
  return masses;
}

namespace {

double fit_objective(std::span<const HistogramBin> bins, std::span<const double> counts, double s,
                     double lambda) {
  const MobilityModel m{s, 0.0, lambda, 3.87};
  const std::vector<double> masses = bin_masses(bins, m);
  double total = 0.0;
  for (const double v : masses) total += v;
  if (!(total > 0.0) || !std::isfinite(total)) return std::numeric_limits<double>::infinity();
  return skl(counts, masses);
}

// Golden-section minimization of f over [lo, hi]; assumes unimodality there.
template <typename F>
double golden_min(F f, double lo, double hi, int iters = 60) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && (b - a) > 1e-7 * (std::fabs(a) + std::fabs(b)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

MobilityModel fit_mobility(std::span<const HistogramBin> bins) {
  std::vector<HistogramBin> sorted(bins.begin(), bins.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const HistogramBin& a, const HistogramBin& b) { return a.center_h < b.center_h; });
  std::size_t nonzero = 0;
  double total_count = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].count < 0.0) throw FormatError("fit_mobility: negative bin count");
    if (i > 0 && !(sorted[i].center_h > sorted[i - 1].center_h)) {
      throw FormatError("fit_mobility: duplicate bin centers");
    }
    if (sorted[i].count > 0.0) ++nonzero;
    total_count += sorted[i].count;
  }
  if (nonzero < 3) throw EmptyInputError("fit_mobility: need at least 3 nonzero bins");

  std::vector<double> counts;
  counts.reserve(sorted.size());
  for (const HistogramBin& b : sorted) counts.push_back(b.count);

  // Count-weighted median bin center anchors the lambda search range
  // (lambda is the median of a log-normal with mu_loc = 0).
  double median_center = sorted.back().center_h;
  double acc = 0.0;
  for (const HistogramBin& b : sorted) {
    acc += b.count;
    if (acc >= 0.5 * total_count) {
      median_center = b.center_h;
      break;
    }
  }
  if (!(median_center > 0.0)) median_center = std::max(sorted.back().center_h, 1e-3);

  constexpr int kGrid = 40;
  const double s_lo = 0.05, s_hi = 3.0;
  const double l_lo = std::max(1e-4, median_center / 8.0), l_hi = median_center * 8.0;
  std::vector<double> s_grid(kGrid), l_grid(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    const double t = static_cast<double>(i) / (kGrid - 1);
    s_grid[static_cast<std::size_t>(i)] = s_lo * std::pow(s_hi / s_lo, t);
    l_grid[static_cast<std::size_t>(i)] = l_lo * std::pow(l_hi / l_lo, t);
  }

  auto objective = [&](double s, double l) { return fit_objective(sorted, counts, s, l); };

  int best_i = 0, best_j = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double v = objective(s_grid[static_cast<std::size_t>(i)],
                                 l_grid[static_cast<std::size_t>(j)]);
      if (v < best) {
        best = v;
        best_i = i;
        best_j = j;
      }
    }
  }
  if (!std::isfinite(best)) throw Error("fit_mobility: no finite objective on the search grid");

  double s = s_grid[static_cast<std::size_t>(best_i)];
  double l = l_grid[static_cast<std::size_t>(best_j)];
  const double s_bra_lo = s_grid[static_cast<std::size_t>(std::max(0, best_i - 1))];
  const double s_bra_hi = s_grid[static_cast<std::size_t>(std::min(kGrid - 1, best_i + 1))];
  const double l_bra_lo = l_grid[static_cast<std::size_t>(std::max(0, best_j - 1))];
  const double l_bra_hi = l_grid[static_cast<std::size_t>(std::min(kGrid - 1, best_j + 1))];
  for (int pass = 0; pass < 3; ++pass) {
    s = golden_min([&](double x) { return objective(x, l); }, s_bra_lo, s_bra_hi);
    l = golden_min([&](double x) { return objective(s, x); }, l_bra_lo, l_bra_hi);
  }
  return MobilityModel{s, 0.0, l, 3.87};
}

std::vector<HistogramBin> load_histogram(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw MissingInputError("cannot open histogram file: " + file.string());
  std::vector<HistogramBin> bins;
  std::string line;
  while (std::getline(f, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string center_tok, count_tok, extra;
    if (!(ls >> center_tok)) continue;
    if (!(ls >> count_tok)) throw FormatError("histogram line missing count: " + line);
    if (ls >> extra) throw FormatError("trailing tokens on histogram line: " + line);
    bins.push_back({parse_double(center_tok, "bin center"), parse_double(count_tok, "bin count")});
  }
  if (bins.empty()) throw EmptyInputError("histogram file has no bins: " + file.string());
  return bins;
}

std::vector<FoundSample> sample_found(const SimulatedPath& path, const MobilityModel& model,
                                      int m_samples, RngStream& rng) {
  if (m_samples < 1) throw ConfigError("sample_found: m_samples must be >= 1");
  const double path_length = path.total_length();
  std::vector<FoundSample> out;
  out.reserve(static_cast<std::size_t>(m_samples));
  const std::span<const Vec2> poly(path.vertices);
  for (int i = 0; i < m_samples; ++i) {
    const double t = sample_time(model, rng);
    const double d = t * model.speed_kmh * 1000.0;
    if (d < 0.0 || d > path_length) continue;
    out.push_back({point_at_arc_length(poly, d), t, path.index, path.behavior});
  }
  return out;
}

PDM build_pdm(std::span<const FoundSample> samples, const RasterGrid& tmpl,
              double out_cell_size) {
  if (samples.empty()) throw EmptyInputError("build_pdm: no samples");
  const double cs = out_cell_size > 0.0 ? out_cell_size : tmpl.cell_size;
  const double width = tmpl.n_cols * tmpl.cell_size;
  const double height = tmpl.n_rows * tmpl.cell_size;
  const int nc = std::max(1, static_cast<int>(std::lround(width / cs)));
  const int nr = std::max(1, static_cast<int>(std::lround(height / cs)));

  PDM pdm;
  pdm.grid = RasterGrid::filled(nc, nr, cs, {tmpl.x_origin, tmpl.y_origin}, 0.0);
  long long binned = 0;
  for (const FoundSample& s : samples) {
    if (const auto cell = pdm.grid.cell_at(s.position)) {
      pdm.grid.at(*cell) += 1.0;
      ++binned;
    }
  }
  if (binned == 0) throw EmptyInputError("build_pdm: no sample falls inside the output extent");
  for (double& v : pdm.grid.values) v /= static_cast<double>(binned);
  pdm.n_samples = binned;
  return pdm;
}

RasterGrid log_view(const RasterGrid& pdm_grid) {
  RasterGrid out = pdm_grid;
  for (double& v : out.values) {
    if (out.is_nodata(v) || v <= 0.0) {
      v = out.nodata;
    } else {
      v = std::log(v);
    }
  }
  return out;
}

void write_samples(std::span<const FoundSample> samples, const std::filesystem::path& file) {
  std::string out;
  out.reserve(samples.size() * 48);
  for (const FoundSample& s : samples) {
    append_double(out, s.position.x);
    out += ' ';
    append_double(out, s.position.y);
    out += ' ';
    append_double(out, s.time_h);
    out += ' ';
    out += behavior_name(s.behavior);
    out += ' ';
    out += std::to_string(s.path_index);
    out += '\n';
  }
  std::ofstream f(file, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + file.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("write failed: " + file.string());
}

std::vector<FoundSample> read_samples(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw MissingInputError("cannot open samples file: " + file.string());
  std::vector<FoundSample> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string x_tok, y_tok, t_tok, b_tok, idx_tok, extra;
    if (!(ls >> x_tok >> y_tok >> t_tok >> b_tok >> idx_tok)) {
      throw FormatError("malformed sample line: " + line);
    }
    if (ls >> extra) throw FormatError("trailing tokens on sample line: " + line);
    FoundSample s;
    s.position = {parse_double(x_tok, "sample x"), parse_double(y_tok, "sample y")};
    s.time_h = parse_double(t_tok, "sample time");
    s.behavior = parse_behavior(b_tok);
    s.path_index = parse_int(idx_tok, "sample path index");
    out.push_back(s);
  }
  return out;
}

}  // namespace lpsim
