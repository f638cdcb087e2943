#include <cmath>
#include <stdexcept>

#include "minimax/oracle.hpp"

namespace minimax {

namespace {

double frobenius_jacobian_bound(const FeasibleSet& gen_set, const FeasibleSet& disc_set,
                                double z_std) {
  // Gradient-field Jacobian entries are affine in the parameters; bound each
  // entry over the feasible sets and take the Frobenius norm.
  const double z2 = z_std * z_std;
  const double g1 = max_abs_coord(gen_set, 0);
  const double g2 = max_abs_coord(gen_set, 1);
  const double d2 = max_abs_coord(disc_set, 1);
  const double xphi = 4.0 * d2 * d2 * (1.0 + z2 * z2);         // d gx / d phi block
  const double cross = 1.0 + 4.0 * g1 * g1 + 4.0 * g2 * g2 * z2 * z2;
  return std::sqrt(xphi + 2.0 * cross);
}

}  // namespace

WganToyOracle::WganToyOracle(double real_mean, double real_std, double z_std,
                             FeasibleSet gen_set, FeasibleSet disc_set)
    : StochasticOracle(2, 2, std::move(gen_set), std::move(disc_set)),
      real_mean_(real_mean),
      real_std_(real_std),
      z_std_(z_std) {
  if (!(real_std > 0.0)) throw std::invalid_argument("wgan toy: real_std must be > 0");
  if (!(z_std > 0.0)) throw std::invalid_argument("wgan toy: z_std must be > 0");
  if (dimension(x_set_) != 2 || dimension(y_set_) != 2)
    throw std::invalid_argument("wgan toy: parameter sets must be 2-dimensional");
  lipschitz_ = frobenius_jacobian_bound(x_set_, y_set_, z_std_);
}

double WganToyOracle::exact_value(std::span<const double> x,
                                  std::span<const double> y) const {
  check_dims(x.size(), y.size());
  const double m2 = real_mean_ * real_mean_ + real_std_ * real_std_;
  return y[0] * (real_mean_ - x[0]) +
         y[1] * (m2 - x[0] * x[0] - x[1] * x[1] * z_std_ * z_std_);
}

void WganToyOracle::exact_gradients(std::span<const double> x, std::span<const double> y,
                                    std::span<double> gx, std::span<double> gy) const {
  check_dims(x.size(), y.size());
  const double z2 = z_std_ * z_std_;
  gx[0] = -y[0] - 2.0 * y[1] * x[0];
  gx[1] = -2.0 * y[1] * x[1] * z2;
  gy[0] = real_mean_ - x[0];
  gy[1] = real_mean_ * real_mean_ + real_std_ * real_std_ - x[0] * x[0] - x[1] * x[1] * z2;
}

void WganToyOracle::sample_gradients(std::span<const double> x, std::span<const double> y,
                                     int b, RngStream& rng, std::span<double> gx,
                                     std::span<double> gy) const {
  if (b < 1) throw std::invalid_argument("sample_gradients: batch must be >= 1");
  check_dims(x.size(), y.size());
  double sx0 = 0.0, sx1 = 0.0, sy0 = 0.0, sy1 = 0.0;
  for (int j = 0; j < b; ++j) {
    const double xr = real_mean_ + real_std_ * rng.normal();
    const double z = z_std_ * rng.normal();
    const double u = x[0] + x[1] * z;        // generated sample
    const double du = -(y[0] + 2.0 * y[1] * u);  // d/du of -D(u)
    sx0 += du;
    sx1 += du * z;
    sy0 += xr - u;
    sy1 += xr * xr - u * u;
  }
  const double inv_b = 1.0 / b;
  gx[0] = sx0 * inv_b;
  gx[1] = sx1 * inv_b;
  gy[0] = sy0 * inv_b;
  gy[1] = sy1 * inv_b;
}

void WganToyOracle::sample_gradients_pair(std::span<const double> x,
                                          std::span<const double> y,
                                          std::span<const double> xp,
                                          std::span<const double> yp, int b,
                                          RngStream& rng, std::span<double> gx,
                                          std::span<double> gy, std::span<double> gxp,
                                          std::span<double> gyp) const {
  if (b < 1) throw std::invalid_argument("sample_gradients_pair: batch must be >= 1");
  check_dims(x.size(), y.size());
  check_dims(xp.size(), yp.size());
  double sx0 = 0.0, sx1 = 0.0, sy0 = 0.0, sy1 = 0.0;
  double px0 = 0.0, px1 = 0.0, py0 = 0.0, py1 = 0.0;
  for (int j = 0; j < b; ++j) {
    const double xr = real_mean_ + real_std_ * rng.normal();
    const double z = z_std_ * rng.normal();

    const double u = x[0] + x[1] * z;
    const double du = -(y[0] + 2.0 * y[1] * u);
    sx0 += du;
    sx1 += du * z;
    sy0 += xr - u;
    sy1 += xr * xr - u * u;

    const double up = xp[0] + xp[1] * z;
    const double dup = -(yp[0] + 2.0 * yp[1] * up);
    px0 += dup;
    px1 += dup * z;
    py0 += xr - up;
    py1 += xr * xr - up * up;
  }
  const double inv_b = 1.0 / b;
  gx[0] = sx0 * inv_b;
  gx[1] = sx1 * inv_b;
  gy[0] = sy0 * inv_b;
  gy[1] = sy1 * inv_b;
  gxp[0] = px0 * inv_b;
  gxp[1] = px1 * inv_b;
  gyp[0] = py0 * inv_b;
  gyp[1] = py1 * inv_b;
}

std::optional<Vec> WganToyOracle::target_x() const {
  // Generator moments match the real distribution at (mean, std / z_std).
  return Vec{real_mean_, real_std_ / z_std_};
}

std::unique_ptr<StochasticOracle> make_wgan_toy(double real_mean, double real_std,
                                                double z_std, FeasibleSet gen_set,
                                                FeasibleSet disc_set) {
  return std::make_unique<WganToyOracle>(real_mean, real_std, z_std, std::move(gen_set),
                                         std::move(disc_set));
}

}  // namespace minimax
