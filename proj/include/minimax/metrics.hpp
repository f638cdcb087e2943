#pragma once

#include <optional>
#include <span>

#include "minimax/errors.hpp"
#include "minimax/geometry.hpp"
#include "minimax/oracle.hpp"
#include "minimax/rng.hpp"

namespace minimax {

enum class GapVariant {
  true_g,       // projected gradient residual of g
  regularized,  // of g_k = g - (rho/2)||y||^2
  prox,         // proximal residual (nonsmooth composite problems)
};

/// First-order stationarity residual at (x, y):
///   x_block = (1/alpha) (x - P_X(x - alpha grad_x))
///   y_block = (1/beta)  (y - P_Y(y + beta grad_y))
/// with P replaced by the prox maps for the prox variant.
struct StationarityGap {
  Vec x_block;
  Vec y_block;
  double norm = 0.0;
  GapVariant variant = GapVariant::true_g;
};

/// Gap from caller-supplied gradients of g. The regularized variant requires
/// rho (throws std::invalid_argument otherwise) and shifts the y-gradient by
/// -rho*y internally. The prox variant applies the given nonsmooth terms with
/// prox stepsizes 1/alpha and 1/beta.
StationarityGap stationarity_gap(std::span<const double> gx, std::span<const double> gy,
                                 std::span<const double> x, std::span<const double> y,
                                 const FeasibleSet& x_set, const FeasibleSet& y_set,
                                 double alpha, double beta, GapVariant variant,
                                 std::optional<double> rho = std::nullopt,
                                 const ProxTerm& prox_x = ZeroTerm{},
                                 const ProxTerm& prox_y = ZeroTerm{});

/// Gap with gradients taken from the oracle: exact when available, otherwise
/// estimated with eval_batch samples from rng (required in that case).
StationarityGap oracle_gap(const StochasticOracle& oracle, std::span<const double> x,
                           std::span<const double> y, double alpha, double beta,
                           GapVariant variant, std::optional<double> rho = std::nullopt,
                           const ProxTerm& prox_x = ZeroTerm{},
                           const ProxTerm& prox_y = ZeroTerm{}, int eval_batch = 0,
                           RngStream* rng = nullptr);

struct DecompositionCheck {
  double lhs = 0.0;  // ||true gap||
  double rhs = 0.0;  // ||regularized gap|| + rho ||y||
  bool holds = false;
};

/// Verifies ||gap(g)|| <= ||gap(g_rho)|| + rho ||y|| at one point
/// (tolerance 1e-10); requires exact gradients.
DecompositionCheck gap_decomposition_check(const StochasticOracle& oracle,
                                           std::span<const double> x,
                                           std::span<const double> y, double alpha,
                                           double beta, double rho);

/// Grid-search envelope of the regularized dual problem:
///   phi = max_{y in Y} g(x, y) - (rho/2)||y||^2, ystar its argmax.
/// One local refinement at a tenth of the coarse spacing. value_slack bounds
/// phi_true - phi; pos_slack bounds ||ystar_true - ystar|| via the rho-strong
/// concavity of the regularized dual (infinite when rho = 0). Ties break to
/// the lexicographically smallest grid index.
struct BruteForceEnvelope {
  double phi = 0.0;
  Vec ystar;
  double h_coarse = 0.0;
  double h_refined = 0.0;
  double value_slack = 0.0;
  double pos_slack = 0.0;
};

/// Requires exact values and d_y <= 3 (throws unsupported_dimension above).
BruteForceEnvelope brute_force_phi(const StochasticOracle& oracle,
                                   std::span<const double> x, double rho,
                                   int resolution = 201);

/// Both sides of the dual-argmax drift inequality
///   ||y*_{k+1}(xbar) - y*_k(x)||^2
///     <= (L^2/rho_{k+1}^2)||xbar - x||^2
///        + ((rho_k - rho_{k+1})/rho_{k+1}) (||y*_{k+1}(xbar)||^2 - ||y*_k(x)||^2)
/// evaluated with brute-force argmaxes; slack accounts for grid error. holds
/// means lhs <= rhs + slack. Violating instances are returned, not asserted.
struct DriftCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
  BruteForceEnvelope at_x;     // rho_k level at x
  BruteForceEnvelope at_xbar;  // rho_{k+1} level at xbar
};

/// Requires rho_k >= rho_kp1 > 0.
DriftCheck ystar_drift_check(const StochasticOracle& oracle,
                                   std::span<const double> x,
                                   std::span<const double> xbar, double rho_k,
                                   double rho_kp1, int resolution = 201);

/// Central finite differences of the exact value against the exact gradients;
/// returns the maximum per-component relative error (denominator floored at 1).
double finite_difference_check(const StochasticOracle& oracle, std::span<const double> x,
                               std::span<const double> y, double h = 1e-5);

}  // namespace minimax
