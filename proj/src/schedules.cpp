#include "minimax/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minimax {

double PowerSeq::at(long k) const {
  return scale / (std::pow(static_cast<double>(k) + shift, num13 / 13.0) + offset);
}

namespace {

double clip_unit(double v) { return std::min(v, 1.0); }

}  // namespace

ScheduleAt schedule_at(const ScheduleConfig& config, long k) {
  if (k < 1) throw std::invalid_argument("schedule_at: sequences start at k = 1");
  if (config.mode == ScheduleMode::manual) {
    if (!config.manual)
      throw std::invalid_argument("schedule_at: manual mode without sequences");
    const auto& m = *config.manual;
    return ScheduleAt{clip_unit(m.eta.at(k)), m.alpha.at(k), m.rho.at(k),
                      clip_unit(m.gamma.at(k)), clip_unit(m.theta.at(k))};
  }
  const double kp2 = static_cast<double>(k) + 2.0;
  const double kp1 = static_cast<double>(k) + 1.0;
  ScheduleAt s;
  s.eta = clip_unit(std::pow(kp2, -5.0 / 13.0));
  s.alpha = config.a4 * std::pow(kp2, -4.0 / 13.0);
  s.rho = config.L * std::pow(kp1, -2.0 / 13.0);
  s.gamma = clip_unit(config.a5 * std::pow(kp2, -12.0 / 13.0));
  s.theta = clip_unit(config.a6 * std::pow(kp2, -8.0 / 13.0));
  return s;
}

ValidationReport validate_constraints(const ScheduleConfig& config) {
  ValidationReport report;
  if (config.mode == ScheduleMode::manual) {
    report.applicable = false;
    report.ok = false;
    report.checks.push_back(
        {"manual mode: theorem constraints not applicable", 0.0, 0.0, false});
    return report;
  }
  const double L = config.L;
  const double beta = config.beta;
  const double b = static_cast<double>(config.batch);
  auto add = [&](std::string name, double lhs, double rhs, bool ok) {
    report.checks.push_back({std::move(name), lhs, rhs, ok});
    report.ok = report.ok && ok;
  };

  add("L > 0", L, 0.0, L > 0.0);
  add("b >= 1", b, 1.0, b >= 1.0);
  add("0 < beta", beta, 0.0, beta > 0.0);
  add("beta <= 1/(6L)", beta, 1.0 / (6.0 * L), beta <= 1.0 / (6.0 * L));

  const double a4_cap = std::min(1.0 / (8.0 * L), beta / (8.0 * std::sqrt(5.0)));
  add("0 < a4", config.a4, 0.0, config.a4 > 0.0);
  add("a4 <= min{1/(8L), beta/(8 sqrt 5)}", config.a4, a4_cap, config.a4 <= a4_cap);

  const double a12_cap =
      std::min(b / (32.0 * config.a4 * L * L), b * config.a4 / (2.0 * L * beta));
  add("0 < a1", config.a1, 0.0, config.a1 > 0.0);
  add("a1 <= min{b/(32 a4 L^2), b a4/(2 L beta)}", config.a1, a12_cap,
      config.a1 <= a12_cap);
  add("0 < a2", config.a2, 0.0, config.a2 > 0.0);
  add("a2 <= min{b/(32 a4 L^2), b a4/(2 L beta)}", config.a2, a12_cap,
      config.a2 <= a12_cap);

  const double a5_floor = 4.0 * config.a4 / config.a1 + 12.0 / 13.0;
  add("a5 >= 4 a4/a1 + 12/13", config.a5, a5_floor, config.a5 >= a5_floor);
  const double a6_floor = 80.0 * config.a4 / config.a2 + 12.0 / 13.0;
  add("a6 >= 80 a4/a2 + 12/13", config.a6, a6_floor, config.a6 >= a6_floor);

  return report;
}

ComplexityTarget complexity_target(double epsilon, double sigma_y, double L) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("complexity_target: epsilon <= 0");
  ComplexityTarget t;
  const double base = 2.0 * L * sigma_y / epsilon;
  t.dual_branch = std::max(0.0, std::pow(base, 13.0 / 2.0) - 1.0);
  return t;
}

double smoothness_from_lipschitz(double ell) {
  if (!(ell > 0.0))
    throw std::invalid_argument("smoothness_from_lipschitz: ell must be positive");
  return ell / (1.0 - std::pow(2.0, -2.0 / 13.0));
}

}  // namespace minimax
