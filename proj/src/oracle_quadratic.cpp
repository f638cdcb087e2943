#include <cmath>
#include <stdexcept>

#include "minimax/kernels.hpp"
#include "minimax/oracle.hpp"

namespace minimax {

namespace {

FeasibleSet centered_box(int dim, double halfwidth) {
  return Box{Vec(dim, -halfwidth), Vec(dim, halfwidth)};
}

}  // namespace

QuadraticSaddleOracle::QuadraticSaddleOracle(const QuadraticSpec& spec,
                                             std::uint64_t seed)
    : StochasticOracle(spec.dx, spec.dy, centered_box(spec.dx, spec.box_halfwidth_x),
                       centered_box(spec.dy, spec.box_halfwidth_y)),
      noise_(spec.noise) {
  if (spec.dx < 1 || spec.dy < 1)
    throw std::invalid_argument("quadratic saddle: dimensions must be positive");
  if (spec.c_min < 0.0)
    throw std::invalid_argument("quadratic saddle: C must be positive semidefinite");
  if (!(spec.c_max >= spec.c_min) || !(spec.a_max >= spec.a_min))
    throw std::invalid_argument("quadratic saddle: empty eigenvalue range");
  if (spec.noise < 0.0) throw std::invalid_argument("quadratic saddle: negative noise");

  RngStream rng(seed);
  Mat qa = random_orthogonal(spec.dx, rng);
  Vec eig_a(spec.dx);
  for (auto& e : eig_a) e = rng.uniform(spec.a_min, spec.a_max);
  a_ = symmetric_from_eigs(qa, eig_a);

  Mat qc = random_orthogonal(spec.dy, rng);
  Vec eig_c(spec.dy);
  for (auto& e : eig_c) e = rng.uniform(spec.c_min, spec.c_max);
  c_ = symmetric_from_eigs(qc, eig_c);

  b_ = Mat(spec.dx, spec.dy);
  for (auto& v : b_.data) v = spec.b_scale * rng.normal() / std::sqrt(double(spec.dy));

  // Constant Jacobian of the gradient field: [[A, B], [B', -C]].
  Mat jac(spec.dx + spec.dy, spec.dx + spec.dy);
  for (int i = 0; i < spec.dx; ++i) {
    for (int j = 0; j < spec.dx; ++j) jac(i, j) = a_(i, j);
    for (int j = 0; j < spec.dy; ++j) jac(i, spec.dx + j) = b_(i, j);
  }
  for (int i = 0; i < spec.dy; ++i) {
    for (int j = 0; j < spec.dx; ++j) jac(spec.dx + i, j) = b_(j, i);
    for (int j = 0; j < spec.dy; ++j) jac(spec.dx + i, spec.dx + j) = -c_(i, j);
  }
  lipschitz_ = opnorm(jac);
}

void QuadraticSaddleOracle::exact_gradients(std::span<const double> x,
                                            std::span<const double> y,
                                            std::span<double> gx,
                                            std::span<double> gy) const {
  check_dims(x.size(), y.size());
  // gx = A x + B y ; gy = B' x - C y
  matvec(a_, x, gx);
  Vec by(dx_);
  matvec(b_, y, by);
  kernels::axpy(1.0, by, gx);
  matvec_t(b_, x, gy);
  Vec cy(dy_);
  matvec(c_, y, cy);
  kernels::axpy(-1.0, cy, gy);
}

double QuadraticSaddleOracle::exact_value(std::span<const double> x,
                                          std::span<const double> y) const {
  check_dims(x.size(), y.size());
  Vec ax(dx_), by(dx_), cy(dy_);
  matvec(a_, x, ax);
  matvec(b_, y, by);
  matvec(c_, y, cy);
  return 0.5 * kernels::dot(x, ax) + kernels::dot(x, by) - 0.5 * kernels::dot(y, cy);
}

void QuadraticSaddleOracle::sample_gradients(std::span<const double> x,
                                             std::span<const double> y, int b,
                                             RngStream& rng, std::span<double> gx,
                                             std::span<double> gy) const {
  if (b < 1) throw std::invalid_argument("sample_gradients: batch must be >= 1");
  exact_gradients(x, y, gx, gy);
  if (noise_ == 0.0) return;
  // Per-sample gradient = exact + noise * xi_j; averaging b samples adds the
  // mean of the xi draws.
  Vec mx(dx_, 0.0), my(dy_, 0.0);
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < dx_; ++i) mx[i] += rng.normal();
    for (int i = 0; i < dy_; ++i) my[i] += rng.normal();
  }
  kernels::axpy(noise_ / b, mx, gx);
  kernels::axpy(noise_ / b, my, gy);
}

void QuadraticSaddleOracle::sample_gradients_pair(
    std::span<const double> x, std::span<const double> y, std::span<const double> xp,
    std::span<const double> yp, int b, RngStream& rng, std::span<double> gx,
    std::span<double> gy, std::span<double> gxp, std::span<double> gyp) const {
  if (b < 1) throw std::invalid_argument("sample_gradients_pair: batch must be >= 1");
  exact_gradients(x, y, gx, gy);
  exact_gradients(xp, yp, gxp, gyp);
  if (noise_ == 0.0) return;
  // The same samples (same noise realizations) evaluated at both points.
  Vec mx(dx_, 0.0), my(dy_, 0.0);
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < dx_; ++i) mx[i] += rng.normal();
    for (int i = 0; i < dy_; ++i) my[i] += rng.normal();
  }
  kernels::scale(noise_ / b, mx);
  kernels::scale(noise_ / b, my);
  kernels::axpy(1.0, mx, gx);
  kernels::axpy(1.0, my, gy);
  kernels::axpy(1.0, mx, gxp);
  kernels::axpy(1.0, my, gyp);
}

Vec QuadraticSaddleOracle::ystar_unconstrained(std::span<const double> x,
                                               double rho) const {
  Vec btx(dy_);
  matvec_t(b_, x, btx);
  return solve_spd(c_, rho, btx);
}

std::unique_ptr<StochasticOracle> make_quadratic_saddle(const QuadraticSpec& spec,
                                                        std::uint64_t seed) {
  return std::make_unique<QuadraticSaddleOracle>(spec, seed);
}

}  // namespace minimax
