#pragma once

#include <span>
#include <variant>
#include <vector>

#include "minimax/linalg.hpp"

namespace minimax {

// ---------------------------------------------------------------------------
// Feasible sets
// ---------------------------------------------------------------------------

/// Axis-aligned box {lower <= z <= upper}, componentwise.
struct Box {
  Vec lower;
  Vec upper;
  bool operator==(const Box&) const = default;
};

/// Euclidean ball {||z - center|| <= radius}.
struct Ball {
  Vec center;
  double radius = 0.0;
  bool operator==(const Ball&) const = default;
};

/// Probability simplex {z >= 0, sum z = 1} in the given dimension.
struct Simplex {
  int dim = 0;
  bool operator==(const Simplex&) const = default;
};

/// Unconstrained domain carrying a norm bound used only for sigma_y
/// bookkeeping; projection is the identity.
struct Unbounded {
  int dim = 0;
  double radius = 0.0;
  bool operator==(const Unbounded&) const = default;
};

using FeasibleSet = std::variant<Box, Ball, Simplex, Unbounded>;

int dimension(const FeasibleSet& set);

/// Throws std::invalid_argument when a set's invariants are violated
/// (box lower > upper, negative ball radius, simplex dim < 1).
void validate(const FeasibleSet& set);

/// max{||z|| : z in set}; the sigma_y of the dual feasible set.
double max_norm(const FeasibleSet& set);

/// max{|z_i| : z in set} for coordinate i.
double max_abs_coord(const FeasibleSet& set, int i);

bool contains(const FeasibleSet& set, std::span<const double> p, double tol = 1e-10);

/// Euclidean projection. Throws std::invalid_argument on dimension mismatch.
Vec project(const FeasibleSet& set, std::span<const double> p);

/// Allocation-free projection for solver loops.
void project_into(const FeasibleSet& set, std::span<const double> p, std::span<double> out);

/// Projection onto the probability simplex via sort-and-threshold:
/// output sums to one, is componentwise nonnegative, and is the
/// Euclidean-nearest simplex point.
Vec simplex_project(std::span<const double> p);

// ---------------------------------------------------------------------------
// Proximity operators
// ---------------------------------------------------------------------------

/// h = 0; the prox reduces to plain projection.
struct ZeroTerm {};

/// h(z) = weight * ||z||_1
struct L1Term {
  double weight = 0.0;
};

/// h = indicator of another set; the prox projects onto the intersection.
struct IndicatorTerm {
  FeasibleSet set;
};

using ProxTerm = std::variant<ZeroTerm, L1Term, IndicatorTerm>;

void validate(const ProxTerm& term);

/// argmin_{z in set} h(z) + (stepsize/2) * ||z - p||^2.
///
/// The quadratic weight is stepsize/2 with stepsize passed directly, so a
/// proximal gradient step with stepsize alpha calls prox(term, set, 1/alpha, p).
/// Supported combinations:
///   Zero over any set; L1 over Box/Unbounded (separable soft-threshold then
///   clamp) and Simplex (the l1 norm is constant there); Indicator of S over
///   an Unbounded ambient set, over an identical set, or Box over Box.
/// Throws std::invalid_argument for nonpositive stepsize, dimension mismatch,
/// or an unsupported combination.
Vec prox(const ProxTerm& term, const FeasibleSet& set, double stepsize,
         std::span<const double> p);

void prox_into(const ProxTerm& term, const FeasibleSet& set, double stepsize,
               std::span<const double> p, std::span<double> out);

}  // namespace minimax
