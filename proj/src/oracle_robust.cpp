#include <cmath>
#include <stdexcept>

#include "minimax/kernels.hpp"
#include "minimax/oracle.hpp"

namespace minimax {

namespace {

// log(1 + exp(-y s)) without overflow.
double logistic_loss(double s, double y) {
  const double m = -y * s;
  return (m > 0.0) ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
}

// d/ds log(1 + exp(-y s)) = -y * sigma(-y s)
double logistic_slope(double s, double y) {
  const double ys = y * s;
  if (ys > 0.0) {
    const double e = std::exp(-ys);
    return -y * (e / (1.0 + e));
  }
  return -y * (1.0 / (1.0 + std::exp(ys)));
}

int model_dim(const std::vector<DomainData>& domains) {
  if (domains.size() < 2)
    throw std::invalid_argument("robust multidomain: need at least 2 domains");
  const int d = domains.front().features.cols;
  for (const auto& dom : domains) {
    if (dom.features.rows < 1)
      throw std::invalid_argument("robust multidomain: empty domain dataset");
    if (dom.features.cols != d)
      throw std::invalid_argument("robust multidomain: inconsistent feature dimension");
    if (static_cast<int>(dom.labels.size()) != dom.features.rows)
      throw std::invalid_argument("robust multidomain: label count mismatch");
  }
  return d;
}

}  // namespace

RobustMultidomainOracle::RobustMultidomainOracle(std::vector<DomainData> domains,
                                                 double x_box_halfwidth)
    : StochasticOracle(model_dim(domains), static_cast<int>(domains.size()),
                       Box{Vec(model_dim(domains), -x_box_halfwidth),
                           Vec(model_dim(domains), x_box_halfwidth)},
                       Simplex{static_cast<int>(domains.size())}),
      data_(std::move(domains)) {
  // Curvature of the weighted loss is at most max_m mean ||z||^2 / 4; the
  // cross blocks are the per-domain gradients, bounded by mean ||z||.
  double max_meansq = 0.0;
  double cross_sq = 0.0;
  for (const auto& dom : data_) {
    double meansq = 0.0, meannorm = 0.0;
    for (int i = 0; i < dom.features.rows; ++i) {
      double sq = 0.0;
      for (int j = 0; j < dom.features.cols; ++j) {
        const double v = dom.features(i, j);
        sq += v * v;
      }
      meansq += sq;
      meannorm += std::sqrt(sq);
    }
    meansq /= dom.features.rows;
    meannorm /= dom.features.rows;
    max_meansq = std::max(max_meansq, meansq);
    cross_sq += meannorm * meannorm;
  }
  lipschitz_ = 0.25 * max_meansq + std::sqrt(cross_sq);
}

double RobustMultidomainOracle::domain_loss(int m, std::span<const double> x) const {
  const auto& dom = data_[m];
  double acc = 0.0;
  for (int i = 0; i < dom.features.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < dom.features.cols; ++j) s += dom.features(i, j) * x[j];
    acc += logistic_loss(s, dom.labels[i]);
  }
  return acc / dom.features.rows;
}

void RobustMultidomainOracle::domain_gradient(int m, std::span<const double> x,
                                              std::span<double> g) const {
  const auto& dom = data_[m];
  for (auto& gi : g) gi = 0.0;
  for (int i = 0; i < dom.features.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < dom.features.cols; ++j) s += dom.features(i, j) * x[j];
    const double slope = logistic_slope(s, dom.labels[i]);
    for (int j = 0; j < dom.features.cols; ++j) g[j] += slope * dom.features(i, j);
  }
  const double inv_n = 1.0 / dom.features.rows;
  for (auto& gi : g) gi *= inv_n;
}

double RobustMultidomainOracle::exact_value(std::span<const double> x,
                                            std::span<const double> y) const {
  check_dims(x.size(), y.size());
  double acc = 0.0;
  for (int m = 0; m < dy_; ++m) acc += y[m] * domain_loss(m, x);
  return acc;
}

void RobustMultidomainOracle::exact_gradients(std::span<const double> x,
                                              std::span<const double> y,
                                              std::span<double> gx,
                                              std::span<double> gy) const {
  check_dims(x.size(), y.size());
  for (auto& g : gx) g = 0.0;
  Vec gm(dx_);
  for (int m = 0; m < dy_; ++m) {
    domain_gradient(m, x, gm);
    kernels::axpy(y[m], gm, gx);
    gy[m] = domain_loss(m, x);
  }
}

void RobustMultidomainOracle::sample_gradients(std::span<const double> x,
                                               std::span<const double> y, int b,
                                               RngStream& rng, std::span<double> gx,
                                               std::span<double> gy) const {
  if (b < 1) throw std::invalid_argument("sample_gradients: batch must be >= 1");
  check_dims(x.size(), y.size());
  for (auto& g : gx) g = 0.0;
  for (auto& g : gy) g = 0.0;
  for (int j = 0; j < b; ++j) {
    // One example drawn from every domain per sample.
    for (int m = 0; m < dy_; ++m) {
      const auto& dom = data_[m];
      const int i = static_cast<int>(rng.index(dom.features.rows));
      double s = 0.0;
      for (int c = 0; c < dx_; ++c) s += dom.features(i, c) * x[c];
      const double slope = logistic_slope(s, dom.labels[i]);
      const double wy = y[m] * slope;
      for (int c = 0; c < dx_; ++c) gx[c] += wy * dom.features(i, c);
      gy[m] += logistic_loss(s, dom.labels[i]);
    }
  }
  const double inv_b = 1.0 / b;
  kernels::scale(inv_b, gx);
  kernels::scale(inv_b, gy);
}

void RobustMultidomainOracle::sample_gradients_pair(
    std::span<const double> x, std::span<const double> y, std::span<const double> xp,
    std::span<const double> yp, int b, RngStream& rng, std::span<double> gx,
    std::span<double> gy, std::span<double> gxp, std::span<double> gyp) const {
  if (b < 1) throw std::invalid_argument("sample_gradients_pair: batch must be >= 1");
  check_dims(x.size(), y.size());
  check_dims(xp.size(), yp.size());
  for (auto& g : gx) g = 0.0;
  for (auto& g : gy) g = 0.0;
  for (auto& g : gxp) g = 0.0;
  for (auto& g : gyp) g = 0.0;
  for (int j = 0; j < b; ++j) {
    for (int m = 0; m < dy_; ++m) {
      const auto& dom = data_[m];
      const int i = static_cast<int>(rng.index(dom.features.rows));
      double s = 0.0, sp = 0.0;
      for (int c = 0; c < dx_; ++c) {
        s += dom.features(i, c) * x[c];
        sp += dom.features(i, c) * xp[c];
      }
      const double w = y[m] * logistic_slope(s, dom.labels[i]);
      const double wp = yp[m] * logistic_slope(sp, dom.labels[i]);
      for (int c = 0; c < dx_; ++c) {
        gx[c] += w * dom.features(i, c);
        gxp[c] += wp * dom.features(i, c);
      }
      gy[m] += logistic_loss(s, dom.labels[i]);
      gyp[m] += logistic_loss(sp, dom.labels[i]);
    }
  }
  const double inv_b = 1.0 / b;
  kernels::scale(inv_b, gx);
  kernels::scale(inv_b, gy);
  kernels::scale(inv_b, gxp);
  kernels::scale(inv_b, gyp);
}

std::unique_ptr<StochasticOracle> make_robust_multidomain(std::vector<DomainData> domains,
                                                          double x_box_halfwidth) {
  return std::make_unique<RobustMultidomainOracle>(std::move(domains), x_box_halfwidth);
}

}  // namespace minimax
