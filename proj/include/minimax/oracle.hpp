#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minimax/geometry.hpp"
#include "minimax/linalg.hpp"
#include "minimax/rng.hpp"

namespace minimax {

/// A stochastic saddle problem min_x max_y E[G(x, y; zeta)].
///
/// Oracles are immutable after construction. All randomness flows through the
/// explicit RngStream argument, so the same stream state reproduces the same
/// minibatch bit for bit and concurrent evaluation with independent streams
/// is safe. Minibatch gradients average b per-sample gradients.
class StochasticOracle {
 public:
  virtual ~StochasticOracle() = default;

  int dx() const { return dx_; }
  int dy() const { return dy_; }
  const FeasibleSet& x_set() const { return x_set_; }
  const FeasibleSet& y_set() const { return y_set_; }

  /// Gradient Lipschitz constant bound of the unregularized objective.
  double lipschitz_estimate() const { return lipschitz_; }

  /// max ||y|| over the dual feasible set.
  double sigma_y() const { return sigma_y_; }

  /// Known primal solution, when the problem has one worth tracking.
  virtual std::optional<Vec> target_x() const { return std::nullopt; }

  /// Minibatch gradient of G at (x, y): averages b per-sample gradients.
  virtual void sample_gradients(std::span<const double> x, std::span<const double> y,
                                int b, RngStream& rng, std::span<double> gx,
                                std::span<double> gy) const = 0;

  /// Minibatch gradients of G at two points with the SAME b samples, as the
  /// momentum correction term requires.
  virtual void sample_gradients_pair(std::span<const double> x,
                                     std::span<const double> y,
                                     std::span<const double> xp,
                                     std::span<const double> yp, int b, RngStream& rng,
                                     std::span<double> gx, std::span<double> gy,
                                     std::span<double> gxp,
                                     std::span<double> gyp) const = 0;

  virtual bool has_exact() const { return false; }

  /// Exact gradients of g = E[G]; throws std::logic_error when unavailable.
  virtual void exact_gradients(std::span<const double> x, std::span<const double> y,
                               std::span<double> gx, std::span<double> gy) const;

  /// Exact objective value g(x, y); throws std::logic_error when unavailable.
  virtual double exact_value(std::span<const double> x, std::span<const double> y) const;

 protected:
  StochasticOracle(int dx, int dy, FeasibleSet x_set, FeasibleSet y_set)
      : dx_(dx), dy_(dy), x_set_(std::move(x_set)), y_set_(std::move(y_set)) {
    validate(x_set_);
    validate(y_set_);
    sigma_y_ = max_norm(y_set_);
  }

  void check_dims(std::size_t x, std::size_t y) const;

  int dx_;
  int dy_;
  FeasibleSet x_set_;
  FeasibleSet y_set_;
  double lipschitz_ = 1.0;
  double sigma_y_ = 0.0;
};

/// View of an oracle with the dual block regularized at level rho:
/// the y-gradient becomes grad_y G - rho * y, the x-gradient is unchanged,
/// and the value becomes g - (rho/2) ||y||^2.
struct RegularizedView {
  const StochasticOracle& base;
  double rho = 0.0;

  void sample_gradients(std::span<const double> x, std::span<const double> y, int b,
                        RngStream& rng, std::span<double> gx, std::span<double> gy) const;
  void exact_gradients(std::span<const double> x, std::span<const double> y,
                       std::span<double> gx, std::span<double> gy) const;
  double exact_value(std::span<const double> x, std::span<const double> y) const;
};

// ---------------------------------------------------------------------------
// Problem zoo
// ---------------------------------------------------------------------------

/// Quadratic saddle g(x,y) = x'Ax/2 + x'By - y'Cy/2 over boxes, with A built
/// from eigenvalues in [a_min, a_max] (possibly indefinite), C from
/// eigenvalues in [c_min, c_max] with c_min >= 0 (concave dual block), and
/// additive Gaussian per-sample gradient noise of standard deviation `noise`.
struct QuadraticSpec {
  int dx = 2;
  int dy = 2;
  double a_min = -1.0;
  double a_max = 1.0;
  double c_min = 0.0;
  double c_max = 1.0;
  double b_scale = 1.0;
  double noise = 0.0;
  double box_halfwidth_x = 10.0;
  double box_halfwidth_y = 10.0;
};

class QuadraticSaddleOracle final : public StochasticOracle {
 public:
  QuadraticSaddleOracle(const QuadraticSpec& spec, std::uint64_t seed);

  void sample_gradients(std::span<const double> x, std::span<const double> y, int b,
                        RngStream& rng, std::span<double> gx,
                        std::span<double> gy) const override;
  void sample_gradients_pair(std::span<const double> x, std::span<const double> y,
                             std::span<const double> xp, std::span<const double> yp,
                             int b, RngStream& rng, std::span<double> gx,
                             std::span<double> gy, std::span<double> gxp,
                             std::span<double> gyp) const override;
  bool has_exact() const override { return true; }
  void exact_gradients(std::span<const double> x, std::span<const double> y,
                       std::span<double> gx, std::span<double> gy) const override;
  double exact_value(std::span<const double> x,
                     std::span<const double> y) const override;

  /// Unconstrained maximizer of the rho-regularized dual problem:
  /// (C + rho I)^{-1} B' x. Requires rho > 0 or C positive definite.
  Vec ystar_unconstrained(std::span<const double> x, double rho) const;

  const Mat& a() const { return a_; }
  const Mat& b() const { return b_; }
  const Mat& c() const { return c_; }
  double noise() const { return noise_; }

 private:
  Mat a_, b_, c_;
  double noise_;
};

/// Two-parameter generator vs quadratic discriminator toy: the generator maps
/// z ~ N(0, z_std^2) through phi1 + phi2 z and the discriminator is
/// psi1 t + psi2 t^2, trained against real samples from N(real_mean,
/// real_std^2). Closed-form expectation available.
class WganToyOracle final : public StochasticOracle {
 public:
  WganToyOracle(double real_mean, double real_std, double z_std, FeasibleSet gen_set,
                FeasibleSet disc_set);

  void sample_gradients(std::span<const double> x, std::span<const double> y, int b,
                        RngStream& rng, std::span<double> gx,
                        std::span<double> gy) const override;
  void sample_gradients_pair(std::span<const double> x, std::span<const double> y,
                             std::span<const double> xp, std::span<const double> yp,
                             int b, RngStream& rng, std::span<double> gx,
                             std::span<double> gy, std::span<double> gxp,
                             std::span<double> gyp) const override;
  bool has_exact() const override { return true; }
  void exact_gradients(std::span<const double> x, std::span<const double> y,
                       std::span<double> gx, std::span<double> gy) const override;
  double exact_value(std::span<const double> x,
                     std::span<const double> y) const override;
  std::optional<Vec> target_x() const override;

 private:
  double real_mean_, real_std_, z_std_;
};

/// One domain of a robust multi-domain learning task: rows of `features` are
/// examples (bias column included by the synthetic generator), labels are +-1.
struct DomainData {
  Mat features;
  Vec labels;
};

/// min_x max_{y in simplex} sum_m y_m f_m(x) with f_m the mean logistic loss
/// of domain m. A per-sample draw picks one example from every domain; the
/// sampled x-gradient is the y-weighted mix of the per-domain example
/// gradients and the sampled y-gradient collects the per-domain example
/// losses. Finite datasets stand in for the domain distributions, so exact
/// gradients are full-dataset averages.
class RobustMultidomainOracle final : public StochasticOracle {
 public:
  RobustMultidomainOracle(std::vector<DomainData> domains, double x_box_halfwidth = 1e3);

  void sample_gradients(std::span<const double> x, std::span<const double> y, int b,
                        RngStream& rng, std::span<double> gx,
                        std::span<double> gy) const override;
  void sample_gradients_pair(std::span<const double> x, std::span<const double> y,
                             std::span<const double> xp, std::span<const double> yp,
                             int b, RngStream& rng, std::span<double> gx,
                             std::span<double> gy, std::span<double> gxp,
                             std::span<double> gyp) const override;
  bool has_exact() const override { return true; }
  void exact_gradients(std::span<const double> x, std::span<const double> y,
                       std::span<double> gx, std::span<double> gy) const override;
  double exact_value(std::span<const double> x,
                     std::span<const double> y) const override;

  int domains() const { return static_cast<int>(data_.size()); }
  /// Full-dataset logistic loss of one domain.
  double domain_loss(int m, std::span<const double> x) const;
  /// Full-dataset loss gradient of one domain.
  void domain_gradient(int m, std::span<const double> x, std::span<double> g) const;

 private:
  std::vector<DomainData> data_;
};

// Factories matching the problem zoo names used by the harness.
std::unique_ptr<StochasticOracle> make_quadratic_saddle(const QuadraticSpec& spec,
                                                        std::uint64_t seed);
std::unique_ptr<StochasticOracle> make_wgan_toy(double real_mean, double real_std,
                                                double z_std, FeasibleSet gen_set,
                                                FeasibleSet disc_set);
std::unique_ptr<StochasticOracle> make_robust_multidomain(std::vector<DomainData> domains,
                                                          double x_box_halfwidth = 1e3);

/// Synthetic linearly-separable-with-noise Gaussian domains for desk-scale
/// robust learning: `features` raw features plus one appended bias column,
/// class means +-separation * u_m along a random unit direction, isotropic
/// noise, and per-domain label flip rates.
std::vector<DomainData> make_synthetic_domains(int domains, int features,
                                               int points_per_domain, double separation,
                                               double noise_sigma,
                                               std::span<const double> flip_rates,
                                               std::uint64_t seed);

/// Reads one domain from CSV: one example per line, label in the last column
/// (0/1 or -1/+1). Throws std::invalid_argument on parse errors or empty data.
DomainData load_domain_csv(const std::string& path);

}  // namespace minimax
