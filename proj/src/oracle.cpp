#include "minimax/oracle.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "minimax/kernels.hpp"

namespace minimax {

void StochasticOracle::check_dims(std::size_t x, std::size_t y) const {
  if (static_cast<int>(x) != dx_ || static_cast<int>(y) != dy_)
    throw std::invalid_argument("oracle: point dimension mismatch");
}

void StochasticOracle::exact_gradients(std::span<const double>, std::span<const double>,
                                       std::span<double>, std::span<double>) const {
  throw std::logic_error("oracle: exact gradients unavailable");
}

double StochasticOracle::exact_value(std::span<const double>,
                                     std::span<const double>) const {
  throw std::logic_error("oracle: exact value unavailable");
}

void RegularizedView::sample_gradients(std::span<const double> x,
                                       std::span<const double> y, int b, RngStream& rng,
                                       std::span<double> gx, std::span<double> gy) const {
  base.sample_gradients(x, y, b, rng, gx, gy);
  kernels::axpy(-rho, y, gy);
}

void RegularizedView::exact_gradients(std::span<const double> x,
                                      std::span<const double> y, std::span<double> gx,
                                      std::span<double> gy) const {
  base.exact_gradients(x, y, gx, gy);
  kernels::axpy(-rho, y, gy);
}

double RegularizedView::exact_value(std::span<const double> x,
                                    std::span<const double> y) const {
  return base.exact_value(x, y) - 0.5 * rho * kernels::sumsq(y);
}

std::vector<DomainData> make_synthetic_domains(int domains, int features,
                                               int points_per_domain, double separation,
                                               double noise_sigma,
                                               std::span<const double> flip_rates,
                                               std::uint64_t seed) {
  if (domains < 2) throw std::invalid_argument("synthetic domains: need at least 2");
  if (features < 1 || points_per_domain < 1)
    throw std::invalid_argument("synthetic domains: empty geometry");
  if (static_cast<int>(flip_rates.size()) != domains)
    throw std::invalid_argument("synthetic domains: one flip rate per domain");
  RngStream rng(seed);
  std::vector<DomainData> out;
  out.reserve(domains);
  for (int m = 0; m < domains; ++m) {
    Vec dir(features);
    double nrm = 0.0;
    for (auto& d : dir) {
      d = rng.normal();
      nrm += d * d;
    }
    nrm = std::sqrt(nrm);
    for (auto& d : dir) d /= nrm;

    DomainData dom;
    dom.features = Mat(points_per_domain, features + 1);  // bias column last
    dom.labels.resize(points_per_domain);
    for (int i = 0; i < points_per_domain; ++i) {
      const double cls = (rng.uniform01() < 0.5) ? -1.0 : 1.0;
      for (int j = 0; j < features; ++j)
        dom.features(i, j) = cls * separation * dir[j] + noise_sigma * rng.normal();
      dom.features(i, features) = 1.0;
      const bool flip = rng.uniform01() < flip_rates[m];
      dom.labels[i] = flip ? -cls : cls;
    }
    out.push_back(std::move(dom));
  }
  return out;
}

DomainData load_domain_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_domain_csv: cannot open " + path);
  std::vector<Vec> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Vec row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("load_domain_csv: bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() < 2)
      throw std::invalid_argument("load_domain_csv: need features plus label");
    if (!rows.empty() && rows.front().size() != row.size())
      throw std::invalid_argument("load_domain_csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("load_domain_csv: empty file " + path);

  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows.front().size()) - 1;
  DomainData dom;
  dom.features = Mat(n, d);
  dom.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) dom.features(i, j) = rows[i][j];
    const double raw = rows[i][d];
    if (raw == 0.0)
      dom.labels[i] = -1.0;
    else if (raw == 1.0 || raw == -1.0)
      dom.labels[i] = raw;
    else
      throw std::invalid_argument("load_domain_csv: labels must be 0/1 or -1/+1");
  }
  return dom;
}

}  // namespace minimax
