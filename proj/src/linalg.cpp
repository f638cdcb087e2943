#include "minimax/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace minimax {

void matvec(const Mat& m, std::span<const double> v, std::span<double> out) {
  for (int i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m.cols; ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
}

void matvec_t(const Mat& m, std::span<const double> v, std::span<double> out) {
  for (int j = 0; j < m.cols; ++j) out[j] = 0.0;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out[j] += m(i, j) * v[i];
}

Vec solve_spd(const Mat& a, double shift, std::span<const double> b) {
  const int n = a.rows;
  if (a.cols != n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve_spd: dimension mismatch");
  Mat l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j) + (i == j ? shift : 0.0);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) throw std::invalid_argument("solve_spd: matrix not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  Vec x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

Mat random_orthogonal(int n, RngStream& rng) {
  Mat q(n, n);
  for (auto& v : q.data) v = rng.normal();
  // Modified Gram-Schmidt on columns, with one re-orthogonalization pass.
  for (int j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < j; ++k) {
        double proj = 0.0;
        for (int i = 0; i < n; ++i) proj += q(i, k) * q(i, j);
        for (int i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
      }
    }
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) {
      // Degenerate draw; fall back to a unit vector.
      for (int i = 0; i < n; ++i) q(i, j) = (i == j) ? 1.0 : 0.0;
    } else {
      for (int i = 0; i < n; ++i) q(i, j) /= nrm;
    }
  }
  return q;
}

Mat symmetric_from_eigs(const Mat& q, std::span<const double> eigs) {
  const int n = q.rows;
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += q(i, k) * eigs[k] * q(j, k);
      out(i, j) = s;
    }
  // Symmetrize against rounding.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      const double m = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = m;
      out(j, i) = m;
    }
  return out;
}

double opnorm(const Mat& m, int iters) {
  if (m.rows == 0 || m.cols == 0) return 0.0;
  Vec v(m.cols, 0.0);
  // Fixed deterministic start vector.
  for (int j = 0; j < m.cols; ++j) v[j] = 1.0 + 0.01 * j;
  Vec mv(m.rows), mtmv(m.cols);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    matvec(m, v, mv);
    matvec_t(m, mv, mtmv);
    double nrm = 0.0;
    for (double c : mtmv) nrm += c * c;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return 0.0;
    for (int j = 0; j < m.cols; ++j) v[j] = mtmv[j] / nrm;
    lambda = nrm;  // ||M^T M v|| with unit v -> sigma_max^2
  }
  return std::sqrt(lambda);
}

}  // namespace minimax
