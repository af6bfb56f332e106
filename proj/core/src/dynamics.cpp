#include "nrcsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nrcsim {

namespace {
constexpr double kIdmMinGap = 0.01;
constexpr double kIdmEmergencyFactor = 10.0;
}  // namespace

void validate(const KraussParams& p) {
  if (!(p.accel > 0.0) || !(p.decel > 0.0)) throw std::invalid_argument("krauss: accel and decel must be > 0");
  if (!(p.sigma >= 0.0 && p.sigma <= 1.0)) throw std::invalid_argument("krauss: sigma must lie in [0, 1]");
  if (!(p.tau > 0.0)) throw std::invalid_argument("krauss: tau must be > 0");
  if (!(p.min_gap >= 0.0)) throw std::invalid_argument("krauss: min_gap must be >= 0");
  if (!(p.v_max > 0.0) || !(p.length > 0.0)) throw std::invalid_argument("krauss: v_max and length must be > 0");
}

void validate(const IdmParams& p) {
  if (!(p.accel > 0.0) || !(p.decel > 0.0) || !(p.T > 0.0) || !(p.s0 > 0.0)) {
    throw std::invalid_argument("idm: accel, decel, T and s0 must be > 0");
  }
  if (!(p.delta >= 1.0)) throw std::invalid_argument("idm: delta must be >= 1");
  if (!(p.v_max > 0.0) || !(p.length > 0.0)) throw std::invalid_argument("idm: v_max and length must be > 0");
}

double krauss_safe_speed(double v, const LeaderView& leader, const KraussParams& p) {
  const double vl = leader.leader_speed;
  return vl + (leader.gap - vl * p.tau) / ((v + vl) / (2.0 * p.decel) + p.tau);
}

double krauss_step(double v, const LeaderView& leader, double v_limit, double dt, double noise_u,
                   const KraussParams& p) {
  double v_des = std::min({v + p.accel * dt, v_limit, p.v_max});
  if (leader.present) v_des = std::min(v_des, krauss_safe_speed(v, leader, p));
  return std::max(0.0, v_des - p.sigma * p.accel * dt * noise_u);
}

double idm_acceleration(double v, double delta_v, double s, const IdmParams& p, double v0) {
  if (s <= 0.0) throw std::invalid_argument("idm: gap must be positive");
  if (s < kIdmMinGap) return -kIdmEmergencyFactor * p.decel;
  const double free_term = std::pow(v / v0, p.delta);
  if (std::isinf(s)) return p.accel * (1.0 - free_term);
  const double s_star =
      p.s0 + std::max(0.0, v * p.T + v * delta_v / (2.0 * std::sqrt(p.accel * p.decel)));
  const double ratio = s_star / s;
  return p.accel * (1.0 - free_term - ratio * ratio);
}

double idm_step(double v, const LeaderView& leader, double v_limit, double dt, const IdmParams& p) {
  const double v0 = std::min(v_limit, p.v_max);
  double a = 0.0;
  if (leader.present) {
    a = idm_acceleration(v, v - leader.leader_speed, leader.gap, p, v0);
  } else {
    a = idm_acceleration(v, 0.0, std::numeric_limits<double>::infinity(), p, v0);
  }
  return std::clamp(v + a * dt, 0.0, v0);
}

double equilibrium_gap(double v, const IdmParams& p, double v0) {
  if (!(v >= 0.0) || !(v < v0)) throw std::invalid_argument("equilibrium_gap: requires 0 <= v < v0");
  return (p.s0 + v * p.T) / std::sqrt(1.0 - std::pow(v / v0, p.delta));
}

}  // namespace nrcsim
