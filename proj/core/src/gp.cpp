#include "lpsim/gp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "lpsim/error.hpp"
#include "lpsim/manifest.hpp"
#include "lpsim/text_io.hpp"

namespace lpsim {

namespace {

constexpr double kSqrt5 = 2.2360679774997896;

double matern_shape(double r) { return (1.0 + kSqrt5 * r + (5.0 / 3.0) * r * r) * std::exp(-kSqrt5 * r); }

}  // namespace

NormalizedHeatmap normalize_heatmap(const RasterGrid& raw) {
  if (raw.values.empty() || raw.n_cols <= 0 || raw.n_rows <= 0) {
    throw EmptyInputError("normalize_heatmap: empty grid");
  }
  double z_min = std::numeric_limits<double>::infinity();
  double z_max = -z_min;
  std::size_t n_data = 0;
  for (const double v : raw.values) {
    if (raw.is_nodata(v)) continue;
    z_min = std::fmin(z_min, v);
    z_max = std::fmax(z_max, v);
    ++n_data;
  }
  if (n_data == 0) throw EmptyInputError("normalize_heatmap: grid is all nodata");

  NormalizedHeatmap out;
  out.record.z_min = z_min;
  out.record.z_max = z_max;
  // x/y affine over the cell-center extent of the grid.
  out.record.x_min = raw.x_origin + 0.5 * raw.cell_size;
  out.record.x_max = raw.x_origin + (raw.n_cols - 0.5) * raw.cell_size;
  out.record.y_min = raw.y_origin + 0.5 * raw.cell_size;
  out.record.y_max = raw.y_origin + (raw.n_rows - 0.5) * raw.cell_size;
  if (out.record.x_max == out.record.x_min) out.record.x_max = out.record.x_min + 1.0;
  if (out.record.y_max == out.record.y_min) out.record.y_max = out.record.y_min + 1.0;

  out.grid = raw;
  if (z_max == z_min) {
    out.record.constant_input = true;
    std::cerr << "warning: constant heatmap; normalizing every data cell to 0.5\n";
    for (double& v : out.grid.values) {
      if (!raw.is_nodata(v)) v = 0.5;
    }
  } else {
    for (double& v : out.grid.values) {
      if (!raw.is_nodata(v)) v = (v - z_min) / (z_max - z_min);
    }
  }
  return out;
}

RasterGrid denormalize_heatmap(const NormalizedHeatmap& h) {
  RasterGrid out = h.grid;
  for (double& v : out.values) {
    if (!out.is_nodata(v)) v = h.record.denorm_z(v);
  }
  return out;
}

double matern25(Vec2 a, Vec2 b, Vec2 length_scale, double output_scale) {
  const double ux = (a.x - b.x) / length_scale.x;
  const double uy = (a.y - b.y) / length_scale.y;
  const double r = std::sqrt(ux * ux + uy * uy);
  return output_scale * matern_shape(r);
}

namespace {

// Keys cubic-convolution kernel, a = -1/2.
double cubic_u(double s) {
  s = std::fabs(s);
  if (s <= 1.0) return 1.5 * s * s * s - 2.5 * s * s + 1.0;
  if (s < 2.0) return -0.5 * s * s * s + 2.5 * s * s - 4.0 * s + 2.0;
  return 0.0;
}

struct Weights1D {
  int i0 = 0;  // leftmost of the 4 lattice indices
  std::array<double, 4> w{};
};

Weights1D weights_1d(double x, int m, double lo, double hi) {
  const double h = (hi - lo) / (m - 1);
  const double t = (x - lo) / h;
  const int i = static_cast<int>(std::floor(t));
  const double f = t - i;
  if (i - 1 < 0 || i + 2 > m - 1) {
    throw Error("kiss_interp_weights: query outside the inducing lattice hull");
  }
  Weights1D out;
  out.i0 = i - 1;
  out.w = {cubic_u(1.0 + f), cubic_u(f), cubic_u(1.0 - f), cubic_u(2.0 - f)};
  return out;
}

}  // namespace

std::vector<std::pair<int, double>> kiss_interp_weights(Vec2 q, int m, double lo, double hi) {
  if (m < 5) throw ConfigError("inducing lattice needs at least 5 points per dimension");
  const Weights1D wx = weights_1d(q.x, m, lo, hi);
  const Weights1D wy = weights_1d(q.y, m, lo, hi);
  std::vector<std::pair<int, double>> out;
  out.reserve(16);
  for (int dy = 0; dy < 4; ++dy) {
    for (int dx = 0; dx < 4; ++dx) {
      const double w = wx.w[static_cast<std::size_t>(dx)] * wy.w[static_cast<std::size_t>(dy)];
      out.emplace_back((wy.i0 + dy) * m + (wx.i0 + dx), w);
    }
  }
  return out;
}

namespace {

Vec2 lattice_point(int flat, int m, double lo, double hi) {
  const double h = (hi - lo) / (m - 1);
  const int ix = flat % m;
  const int iy = flat / m;
  return {lo + ix * h, lo + iy * h};
}

}  // namespace

double kiss_approx_kernel(Vec2 a, Vec2 b, int m, double lo, double hi, Vec2 length_scale,
                          double output_scale) {
  const auto wa = kiss_interp_weights(a, m, lo, hi);
  const auto wb = kiss_interp_weights(b, m, lo, hi);
  double sum = 0.0;
  for (const auto& [ia, va] : wa) {
    for (const auto& [ib, vb] : wb) {
      sum += va * vb *
             matern25(lattice_point(ia, m, lo, hi), lattice_point(ib, m, lo, hi), length_scale,
                      output_scale);
    }
  }
  return sum;
}

namespace {

// Dense Gram matrix and its per-log-hyperparameter derivatives.
struct KernelMats {
  Eigen::MatrixXd k;               // output_scale * shape(r), no noise
  Eigen::MatrixXd d_log_lsx;       // d k / d log ls.x
  Eigen::MatrixXd d_log_lsy;       // d k / d log ls.y
};

KernelMats kernel_mats(std::span<const Vec2> a, std::span<const Vec2> b, Vec2 ls, double os) {
  const auto n = static_cast<Eigen::Index>(a.size());
  const auto m = static_cast<Eigen::Index>(b.size());
  KernelMats out;
  out.k.resize(n, m);
  out.d_log_lsx.resize(n, m);
  out.d_log_lsy.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double ux = (a[static_cast<std::size_t>(i)].x - b[static_cast<std::size_t>(j)].x) / ls.x;
      const double uy = (a[static_cast<std::size_t>(i)].y - b[static_cast<std::size_t>(j)].y) / ls.y;
      const double r2 = ux * ux + uy * uy;
      const double r = std::sqrt(r2);
      const double decay = std::exp(-kSqrt5 * r);
      out.k(i, j) = os * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r2) * decay;
      const double common = os * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * decay;
      out.d_log_lsx(i, j) = common * ux * ux;
      out.d_log_lsy(i, j) = common * uy * uy;
    }
  }
  return out;
}

struct ExactEval {
  double mll = 0.0;
  std::array<double, 4> grad{};  // d/dlog(lsx, lsy, output, noise)
  Eigen::VectorXd alpha;
  bool finite = false;
};

ExactEval exact_eval(std::span<const Vec2> pts, std::span<const double> y, Vec2 ls, double os,
                     double noise, double jitter, bool want_grad) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  ExactEval out;
  if (!(ls.x > 0.0) || !(ls.y > 0.0) || !(os > 0.0) || !(noise > 0.0)) return out;

  const KernelMats mats = kernel_mats(pts, pts, ls, os);
  Eigen::MatrixXd k = mats.k;
  k.diagonal().array() += noise + jitter;
  const Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return out;

  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  out.alpha = llt.solve(yv);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(llt.matrixL()(i, i));
  logdet *= 2.0;
  out.mll = -0.5 * yv.dot(out.alpha) - 0.5 * logdet -
            0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
  if (!std::isfinite(out.mll)) return out;

  if (want_grad) {
    const Eigen::MatrixXd kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    auto grad_for = [&](const Eigen::MatrixXd& dk) {
      return 0.5 * (out.alpha.dot(dk * out.alpha) - kinv.cwiseProduct(dk).sum());
    };
    out.grad[0] = grad_for(mats.d_log_lsx);
    out.grad[1] = grad_for(mats.d_log_lsy);
    out.grad[2] = grad_for(mats.k);  // d k / d log output_scale == k
    // d K / d log noise == noise * I
    out.grad[3] = 0.5 * noise * (out.alpha.squaredNorm() - kinv.trace());
    for (const double g : out.grad) {
      if (!std::isfinite(g)) return out;
    }
  }
  out.finite = true;
  return out;
}

// KISS evaluation through the Woodbury identity. W is the sparse
// interpolation matrix, B the inducing-grid Gram matrix.
struct KissEval {
  double mll = 0.0;
  std::array<double, 4> grad{};
  Eigen::VectorXd alpha;  // Ktilde^-1 y (length n)
  bool finite = false;
};

struct KissWork {
  Eigen::SparseMatrix<double> w;       // n x u
  std::vector<Vec2> lattice;           // u points
};

KissWork build_kiss_work(std::span<const Vec2> pts, int m) {
  KissWork work;
  const int u = m * m;
  work.lattice.reserve(static_cast<std::size_t>(u));
  for (int i = 0; i < u; ++i) work.lattice.push_back(lattice_point(i, m, kLatticeLo, kLatticeHi));
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(pts.size() * 16);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (const auto& [j, wij] : kiss_interp_weights(pts[i], m, kLatticeLo, kLatticeHi)) {
      if (wij != 0.0) trips.emplace_back(static_cast<int>(i), j, wij);
    }
  }
  work.w.resize(static_cast<Eigen::Index>(pts.size()), u);
  work.w.setFromTriplets(trips.begin(), trips.end());
  return work;
}

KissEval kiss_eval(const KissWork& work, std::span<const double> y, Vec2 ls, double os,
                   double noise, double jitter, bool want_grad) {
  KissEval out;
  if (!(ls.x > 0.0) || !(ls.y > 0.0) || !(os > 0.0) || !(noise > 0.0)) return out;
  const auto n = work.w.rows();
  const auto u = work.w.cols();

  const KernelMats mats = kernel_mats(work.lattice, work.lattice, ls, os);
  Eigen::MatrixXd b = mats.k;
  b.diagonal().array() += jitter;
  const Eigen::LLT<Eigen::MatrixXd> b_llt(b);
  if (b_llt.info() != Eigen::Success) return out;
  const Eigen::MatrixXd b_inv = b_llt.solve(Eigen::MatrixXd::Identity(u, u));

  const Eigen::MatrixXd g = (Eigen::MatrixXd(work.w.transpose() * work.w));
  const double s2 = noise;
  Eigen::MatrixXd c = b_inv + g / s2;
  const Eigen::LLT<Eigen::MatrixXd> c_llt(c);
  if (c_llt.info() != Eigen::Success) return out;

  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  const Eigen::VectorXd wty = work.w.transpose() * yv;
  // alpha = s2^-1 y - s2^-2 W C^-1 W^T y
  out.alpha = yv / s2 - (work.w * c_llt.solve(wty)) / (s2 * s2);

  double logdet_c = 0.0;
  for (Eigen::Index i = 0; i < u; ++i) logdet_c += std::log(c_llt.matrixL()(i, i));
  double logdet_b = 0.0;
  for (Eigen::Index i = 0; i < u; ++i) logdet_b += std::log(b_llt.matrixL()(i, i));
  const double logdet =
      2.0 * logdet_c + 2.0 * logdet_b + static_cast<double>(n) * std::log(s2);
  out.mll = -0.5 * yv.dot(out.alpha) - 0.5 * logdet -
            0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
  if (!std::isfinite(out.mll)) return out;

  if (want_grad) {
    const Eigen::VectorXd a = work.w.transpose() * out.alpha;  // u
    // S = W^T Ktilde^-1 W = G/s2 - G C^-1 G / s2^2
    const Eigen::MatrixXd cinv_g = c_llt.solve(g);
    const Eigen::MatrixXd s_mat = g / s2 - g * cinv_g / (s2 * s2);
    auto grad_for = [&](const Eigen::MatrixXd& db) {
      return 0.5 * (a.dot(db * a) - s_mat.cwiseProduct(db).sum());
    };
    out.grad[0] = grad_for(mats.d_log_lsx);
    out.grad[1] = grad_for(mats.d_log_lsy);
    out.grad[2] = grad_for(mats.k);
    const double tr_kinv = static_cast<double>(n) / s2 - cinv_g.trace() / (s2 * s2);
    out.grad[3] = 0.5 * s2 * (out.alpha.squaredNorm() - tr_kinv);
    for (const double gval : out.grad) {
      if (!std::isfinite(gval)) return out;
    }
  }
  out.finite = true;
  return out;
}

}  // namespace

double gp_mll(std::span<const Vec2> points, std::span<const double> targets, Vec2 length_scale,
              double output_scale, double noise_variance, double jitter) {
  const ExactEval e = exact_eval(points, targets, length_scale, output_scale, noise_variance,
                                 jitter, /*want_grad=*/false);
  if (!e.finite) throw Error("gp_mll: non-finite likelihood at these hyperparameters");
  return e.mll;
}

std::pair<double, std::array<double, 4>> gp_mll_and_grad(std::span<const Vec2> points,
                                                         std::span<const double> targets,
                                                         Vec2 length_scale, double output_scale,
                                                         double noise_variance, double jitter) {
  const ExactEval e = exact_eval(points, targets, length_scale, output_scale, noise_variance,
                                 jitter, /*want_grad=*/true);
  if (!e.finite) throw Error("gp_mll_and_grad: non-finite likelihood at these hyperparameters");
  return {e.mll, e.grad};
}

GPTrainConfig GPTrainConfig::from_params(const Params& p) {
  GPTrainConfig cfg;
  cfg.iters = p.gp_iters;
  cfg.lr = p.gp_lr;
  cfg.noise_init = p.gp_noise_init;
  cfg.length_scale_init = p.gp_length_scale_init;
  cfg.output_scale_init = p.gp_output_scale_init;
  cfg.jitter = p.gp_jitter;
  cfg.exact_max_points = p.gp_exact_max_points;
  cfg.inducing_per_dim = p.gp_inducing_per_dim;
  return cfg;
}

GPModel train_gp(const RasterGrid& heatmap, const GPTrainConfig& cfg) {
  const NormalizedHeatmap nh = normalize_heatmap(heatmap);

  std::vector<Vec2> pts;
  std::vector<double> y;
  for (int r = 0; r < nh.grid.n_rows; ++r) {
    for (int c = 0; c < nh.grid.n_cols; ++c) {
      const double v = nh.grid.at({c, r});
      if (nh.grid.is_nodata(v)) continue;
      const Vec2 center = nh.grid.cell_center({c, r});
      pts.push_back({nh.record.norm_x(center.x), nh.record.norm_y(center.y)});
      y.push_back(v);
    }
  }
  if (pts.size() < 2) throw EmptyInputError("train_gp: need at least 2 data points");

  const bool use_kiss = pts.size() > static_cast<std::size_t>(cfg.exact_max_points);
  KissWork kiss_work;
  if (use_kiss) kiss_work = build_kiss_work(pts, cfg.inducing_per_dim);

  // Optimize x = log(ls.x, ls.y, output_scale, noise_variance).
  std::array<double, 4> x = {std::log(cfg.length_scale_init), std::log(cfg.length_scale_init),
                             std::log(cfg.output_scale_init), std::log(cfg.noise_init)};
  auto evaluate = [&](const std::array<double, 4>& p, bool want_grad) {
    const Vec2 ls{std::exp(p[0]), std::exp(p[1])};
    const double os = std::exp(p[2]);
    const double noise = std::exp(p[3]);
    if (use_kiss) {
      const KissEval e = kiss_eval(kiss_work, y, ls, os, noise, cfg.jitter, want_grad);
      return std::tuple(e.finite, e.mll, e.grad);
    }
    const ExactEval e = exact_eval(pts, y, ls, os, noise, cfg.jitter, want_grad);
    return std::tuple(e.finite, e.mll, e.grad);
  };

  auto [finite0, mll0, grad0] = evaluate(x, true);
  if (!finite0) throw Error("train_gp: non-finite likelihood at the initial hyperparameters");

  GPModel model;
  model.accepted_mll.push_back(mll0);
  std::array<double, 4> best_x = x;
  double best_mll = mll0;

  std::array<double, 4> m{};  // Adam first moment
  std::array<double, 4> v{};  // Adam second moment
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::array<double, 4> grad = grad0;

  for (int it = 1; it <= cfg.iters; ++it) {
    std::array<double, 4> delta{};
    for (int j = 0; j < 4; ++j) {
      m[j] = beta1 * m[j] + (1.0 - beta1) * grad[j];
      v[j] = beta2 * v[j] + (1.0 - beta2) * grad[j] * grad[j];
      const double mhat = m[j] / (1.0 - std::pow(beta1, it));
      const double vhat = v[j] / (1.0 - std::pow(beta2, it));
      delta[j] = cfg.lr * mhat / (std::sqrt(vhat) + eps);
    }

    std::array<double, 4> x_new{};
    bool ok = false;
    double mll_new = 0.0;
    std::array<double, 4> grad_new{};
    for (int retry = 0; retry <= 5; ++retry) {
      for (int j = 0; j < 4; ++j) x_new[j] = x[j] + delta[j];
      auto [finite, mll_try, grad_try] = evaluate(x_new, true);
      if (finite) {
        ok = true;
        mll_new = mll_try;
        grad_new = grad_try;
        break;
      }
      for (double& d : delta) d *= 0.5;
    }
    if (!ok) {
      throw Error("train_gp: likelihood stayed non-finite after 5 halved-step retries");
    }
    x = x_new;
    grad = grad_new;
    if (mll_new >= best_mll) {
      best_mll = mll_new;
      best_x = x;
      model.accepted_mll.push_back(mll_new);
    }
  }

  model.trained = true;
  model.used_kiss = use_kiss;
  model.length_scale = {std::exp(best_x[0]), std::exp(best_x[1])};
  model.output_scale = std::exp(best_x[2]);
  model.noise_variance = std::exp(best_x[3]);
  model.final_mll = best_mll;
  model.record = nh.record;
  model.n_cols = heatmap.n_cols;
  model.n_rows = heatmap.n_rows;
  model.cell_size = heatmap.cell_size;
  model.x0 = heatmap.x_origin;
  model.y0 = heatmap.y_origin;
  model.points = pts;

  if (use_kiss) {
    model.lattice_m = cfg.inducing_per_dim;
    const KissEval e = kiss_eval(kiss_work, y, model.length_scale, model.output_scale,
                                 model.noise_variance, cfg.jitter, /*want_grad=*/false);
    if (!e.finite) throw Error("train_gp: prediction state failed at the optimum");
    const Eigen::VectorXd a = kiss_work.w.transpose() * e.alpha;
    const KernelMats mats =
        kernel_mats(kiss_work.lattice, kiss_work.lattice, model.length_scale, model.output_scale);
    Eigen::MatrixXd b = mats.k;
    b.diagonal().array() += cfg.jitter;
    const Eigen::VectorXd kv = b * a;
    model.kiss_v.assign(kv.data(), kv.data() + kv.size());
  } else {
    const ExactEval e = exact_eval(pts, y, model.length_scale, model.output_scale,
                                   model.noise_variance, cfg.jitter, /*want_grad=*/false);
    if (!e.finite) throw Error("train_gp: prediction state failed at the optimum");
    model.alpha.assign(e.alpha.data(), e.alpha.data() + e.alpha.size());
  }
  return model;
}

double GPModel::predict_norm(Vec2 q) const {
  if (!trained) throw Error("GPModel: not trained");
  if (used_kiss) {
    double sum = 0.0;
    for (const auto& [j, w] : kiss_interp_weights(q, lattice_m, kLatticeLo, kLatticeHi)) {
      sum += w * kiss_v[static_cast<std::size_t>(j)];
    }
    return sum;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sum += matern25(q, points[i], length_scale, output_scale) * alpha[i];
  }
  return sum;
}

double GPModel::predict_world(Vec2 p) const {
  const double z = predict_norm({record.norm_x(p.x), record.norm_y(p.y)});
  return record.denorm_z(z);
}

RasterGrid posterior_grid(const GPModel& model, double out_cell_size) {
  if (!model.trained) throw Error("posterior_grid: model is not trained");
  if (!(out_cell_size > 0.0)) throw ConfigError("posterior_grid: output cell size must be > 0");
  const double width = model.n_cols * model.cell_size;
  const double height = model.n_rows * model.cell_size;
  const int nc = std::max(1, static_cast<int>(std::lround(width / out_cell_size)));
  const int nr = std::max(1, static_cast<int>(std::lround(height / out_cell_size)));
  RasterGrid out = RasterGrid::filled(nc, nr, out_cell_size, {model.x0, model.y0}, 0.0);
  for (int r = 0; r < nr; ++r) {
    for (int c = 0; c < nc; ++c) {
      out.at({c, r}) = std::fmax(0.0, model.predict_world(out.cell_center({c, r})));
    }
  }
  return out;
}

std::vector<Vec2> sample_pls(const RasterGrid& grid, int n, RngStream& rng) {
  if (n < 1) throw Error("sample_pls: n must be >= 1");
  std::vector<double> cum;
  cum.reserve(grid.values.size());
  double total = 0.0;
  for (const double v : grid.values) {
    const double mass = (grid.is_nodata(v) || v < 0.0) ? 0.0 : v;
    total += mass;
    cum.push_back(total);
  }
  if (!(total > 0.0)) throw EmptyInputError("sample_pls: grid has zero total mass");

  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const auto flat = static_cast<int>(std::min<std::ptrdiff_t>(
        it - cum.begin(), static_cast<std::ptrdiff_t>(cum.size()) - 1));
    const CellIndex cell{flat % grid.n_cols, flat / grid.n_cols};
    out.push_back(grid.cell_center(cell));
  }
  return out;
}

void save_gp_model(const GPModel& model, const std::filesystem::path& out,
                   const std::filesystem::path& training_ref) {
  std::string text;
  text += "length_scale_x " + format_double(model.length_scale.x) + "\n";
  text += "length_scale_y " + format_double(model.length_scale.y) + "\n";
  text += "output_scale " + format_double(model.output_scale) + "\n";
  text += "noise_variance " + format_double(model.noise_variance) + "\n";
  text += "final_mll " + format_double(model.final_mll) + "\n";
  text += "normalization " + format_double(model.record.z_min) + " " +
          format_double(model.record.z_max) + " " + format_double(model.record.x_min) + " " +
          format_double(model.record.x_max) + " " + format_double(model.record.y_min) + " " +
          format_double(model.record.y_max) + "\n";
  text += "grid " + std::to_string(model.n_cols) + " " + std::to_string(model.n_rows) + " " +
          format_double(model.cell_size) + " " + format_double(model.x0) + " " +
          format_double(model.y0) + "\n";
  text += std::string("mode ") + (model.used_kiss ? "kiss" : "exact") + "\n";
  if (model.used_kiss) text += "inducing_per_dim " + std::to_string(model.lattice_m) + "\n";
  text += "training_data " + training_ref.string() + " fnv1a " + file_checksum(training_ref) +
          "\n";
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + out.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error("write failed: " + out.string());
}

}  // namespace lpsim
