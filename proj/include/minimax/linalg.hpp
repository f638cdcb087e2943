#pragma once

#include <span>
#include <vector>

#include "minimax/rng.hpp"

// Small dense helpers for the problem zoo and metrics: the matrices involved
// are a handful of rows/columns, so plain row-major storage and O(n^3) solves
// are all that is needed.

namespace minimax {

using Vec = std::vector<double>;

struct Mat {
  int rows = 0;
  int cols = 0;
  Vec data;  // row-major

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
};

/// out = M * v
void matvec(const Mat& m, std::span<const double> v, std::span<double> out);

/// out = M^T * v
void matvec_t(const Mat& m, std::span<const double> v, std::span<double> out);

/// Solve (A + shift*I) x = b for symmetric positive definite A + shift*I.
/// Plain Cholesky; throws std::invalid_argument if the matrix is not SPD.
Vec solve_spd(const Mat& a, double shift, std::span<const double> b);

/// Random orthogonal matrix (modified Gram-Schmidt on a Gaussian matrix).
Mat random_orthogonal(int n, RngStream& rng);

/// Q * diag(eigs) * Q^T
Mat symmetric_from_eigs(const Mat& q, std::span<const double> eigs);

/// Largest singular value estimate via power iteration on M^T M.
double opnorm(const Mat& m, int iters = 200);

}  // namespace minimax
