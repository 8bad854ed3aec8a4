#pragma once

// Two-segment leg with a parallel knee spring and a flexion-only damper.
//
// Conventions: the knee angle beta is measured between the segments, so the
// leg shortens as beta decreases (flexion, betadot < 0). Spring torque is
// k r_k^2 (beta0 - beta): positive torque extends the leg. Angles are radians.

#include <numbers>

namespace legdamp {

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct LegParams {
  double mass = 0.408;              // kg, lumped at the hip
  double lambda1 = 0.15;            // m, upper segment
  double lambda2 = 0.15;            // m, lower segment
  double k = 5900.0;                // N/m, knee spring
  double r_k = 0.025;               // m, spring lever arm
  double r_d = 0.02;                // m, damper lever arm
  double beta0 = deg_to_rad(110.0); // rad, knee resting angle
  double g = 9.81;                  // m/s^2

  /// Throws ValidationError naming the first field that breaks an invariant.
  void validate() const;

  /// Leg length at the resting knee angle (touch-down length l0).
  double rest_length() const;
};

struct DamperSpec {
  double dv = 0.0;                 // N s/m, viscous coefficient
  double dc = 0.0;                 // N, Coulomb coefficient
  double velocity_deadband = 1e-6; // rad/s

  static DamperSpec viscous(double dv) { return {dv, 0.0}; }
  static DamperSpec coulomb(double dc) { return {0.0, dc}; }
  static DamperSpec none() { return {}; }

  void validate() const;
};

struct StanceState {
  double y = 0.0;       // hip height [m]
  double ydot = 0.0;    // [m/s]
  double beta = 0.0;    // knee angle [rad]
  double betadot = 0.0; // [rad/s]
};

/// Law-of-cosines leg length. Throws DomainError unless beta is in (0, pi).
double leg_length(double beta, const LegParams& params);

/// dl/dbeta = lambda1 lambda2 sin(beta) / l(beta).
double leg_length_jacobian(double beta, const LegParams& params);

/// Inverse of leg_length on (0, pi). Throws DomainError unless 0 < y < lambda1 + lambda2.
double beta_from_length(double y, const LegParams& params);

/// Knee angular velocity slaved to the hip velocity through the contact constraint.
/// Throws SingularityError when sin(beta) vanishes.
double betadot_from(double y, double ydot, const LegParams& params);

double spring_torque(double beta, const LegParams& params);

/// Flexion-only damper torque. Zero during extension (betadot >= 0) and inside
/// the deadband; otherwise dc r_d + dv r_d^2 |betadot|, i.e. always opposing flexion.
double damper_torque(double betadot, const DamperSpec& spec, const LegParams& params);

/// Spring plus damper torque about the knee.
double knee_torque(double beta, double betadot, const DamperSpec& spec, const LegParams& params);

/// Vertical force at the hip for knee torque tau. Zero in flight (y > l0).
/// Throws SingularityError when sin(beta) vanishes.
double leg_force(double y, double beta, double tau, const LegParams& params);

}  // namespace legdamp
