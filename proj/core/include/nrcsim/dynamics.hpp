#pragma once

#include <limits>

namespace nrcsim {

/// Stochastic safe-velocity model driving human vehicles.
struct KraussParams {
  double accel = 2.6;    // m/s^2
  double decel = 4.5;    // m/s^2
  double tau = 1.0;      // reaction time, s
  double sigma = 0.5;    // driver imperfection in [0, 1]
  double v_max = 50.0;   // m/s
  double min_gap = 2.5;  // m
  double length = 5.0;   // m
};

/// Intelligent Driver Model parameters for automated vehicles.
struct IdmParams {
  double accel = 2.6;   // m/s^2
  double decel = 4.5;   // comfortable braking, m/s^2
  double T = 0.5;       // desired time headway, s
  double s0 = 1.0;      // jam gap, m
  double delta = 4.0;   // acceleration exponent
  double v_max = 50.0;  // m/s
  double length = 5.0;  // m
};

/// What a follower sees ahead in its lane. `gap` is net bumper-to-bumper distance.
struct LeaderView {
  double leader_speed = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  bool present = false;

  static LeaderView none() { return {}; }
  static LeaderView vehicle(double speed, double gap) { return {speed, gap, true}; }
};

/// Throws std::invalid_argument when a parameter set violates its invariants.
void validate(const KraussParams& p);
void validate(const IdmParams& p);

/// v_safe = v_l + (g - v_l * tau) / ((v + v_l) / (2 b) + tau). May be negative.
double krauss_safe_speed(double v, const LeaderView& leader, const KraussParams& p);

/// One Krauss update: v_des = min(v + a dt, v_safe, v_limit, v_max), then the
/// imperfection term sigma * a * dt * noise_u is subtracted and the result
/// clamped at zero. `noise_u` is a uniform sample in [0, 1].
double krauss_step(double v, const LeaderView& leader, double v_limit, double dt, double noise_u,
                   const KraussParams& p);

/// IDM acceleration for desired speed `v0`:
///   a = accel * [1 - (v / v0)^delta - (s* / s)^2],
///   s* = s0 + max(0, v T + v dv / (2 sqrt(accel decel))).
/// Pass s = +inf and dv = 0 for free road. Gaps below 1 cm return the emergency
/// value -10 * decel. Throws std::invalid_argument when s <= 0.
double idm_acceleration(double v, double delta_v, double s, const IdmParams& p, double v0);

/// Same, with v0 = p.v_max.
inline double idm_acceleration(double v, double delta_v, double s, const IdmParams& p) {
  return idm_acceleration(v, delta_v, s, p, p.v_max);
}

/// Explicit Euler IDM update with v0 = min(v_limit, v_max); result clamped to [0, v0].
double idm_step(double v, const LeaderView& leader, double v_limit, double dt, const IdmParams& p);

/// Steady-state IDM gap at speed v behind a leader of equal speed:
/// (s0 + v T) / sqrt(1 - (v / v0)^delta). Requires 0 <= v < v0.
double equilibrium_gap(double v, const IdmParams& p, double v0);

}  // namespace nrcsim
