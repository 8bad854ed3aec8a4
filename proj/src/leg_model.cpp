#include "legdamp/leg_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "legdamp/errors.hpp"

namespace legdamp {

namespace {

constexpr double kSingularSin = 1e-12;

void require_positive(const char* field, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(field, "must be a finite value > 0 (got " + std::to_string(value) + ")");
  }
}

}  // namespace

void LegParams::validate() const {
  require_positive("mass", mass);
  require_positive("lambda1", lambda1);
  require_positive("lambda2", lambda2);
  require_positive("k", k);
  require_positive("r_k", r_k);
  require_positive("r_d", r_d);
  require_positive("g", g);
  if (!(beta0 > 0.0 && beta0 < std::numbers::pi)) {
    throw ValidationError("beta0", "must lie in (0, pi) rad (got " + std::to_string(beta0) + ")");
  }
  const double l0 = rest_length();
  if (!(l0 > 0.0 && l0 < lambda1 + lambda2)) {
    throw ValidationError("beta0", "resting leg length must lie in (0, lambda1 + lambda2)");
  }
}

double LegParams::rest_length() const { return leg_length(beta0, *this); }

void DamperSpec::validate() const {
  if (!(dv >= 0.0) || !std::isfinite(dv)) {
    throw ValidationError("dv", "viscous coefficient must be >= 0 (got " + std::to_string(dv) + ")");
  }
  if (!(dc >= 0.0) || !std::isfinite(dc)) {
    throw ValidationError("dc", "Coulomb coefficient must be >= 0 (got " + std::to_string(dc) + ")");
  }
  if (!(velocity_deadband > 0.0) || !std::isfinite(velocity_deadband)) {
    throw ValidationError("deadband", "velocity deadband must be > 0");
  }
}

double leg_length(double beta, const LegParams& p) {
  if (!(beta > 0.0 && beta < std::numbers::pi)) {
    throw DomainError("leg_length: knee angle " + std::to_string(beta) + " rad outside (0, pi)");
  }
  const double sq = p.lambda1 * p.lambda1 + p.lambda2 * p.lambda2 - 2.0 * p.lambda1 * p.lambda2 * std::cos(beta);
  return std::sqrt(std::max(sq, 0.0));
}

double leg_length_jacobian(double beta, const LegParams& p) {
  const double l = leg_length(beta, p);
  const double s = std::sin(beta);
  if (std::abs(s) < kSingularSin || l == 0.0) {
    throw SingularityError("leg_length_jacobian: singular knee angle " + std::to_string(beta));
  }
  return p.lambda1 * p.lambda2 * s / l;
}

double beta_from_length(double y, const LegParams& p) {
  if (!(y > 0.0 && y < p.lambda1 + p.lambda2)) {
    throw DomainError("beta_from_length: length " + std::to_string(y) + " m outside (0, lambda1 + lambda2)");
  }
  const double c = (p.lambda1 * p.lambda1 + p.lambda2 * p.lambda2 - y * y) / (2.0 * p.lambda1 * p.lambda2);
  // |lambda1 - lambda2| bounds the reachable lengths from below for unequal segments.
  if (c > 1.0 || c < -1.0) {
    throw DomainError("beta_from_length: length " + std::to_string(y) + " m not reachable by the segments");
  }
  return std::acos(c);
}

double betadot_from(double y, double ydot, const LegParams& p) {
  const double beta = beta_from_length(y, p);
  const double s = std::sin(beta);
  if (std::abs(s) < kSingularSin) {
    throw SingularityError("betadot_from: singular knee angle " + std::to_string(beta));
  }
  return ydot * y / (p.lambda1 * p.lambda2 * s);
}

double spring_torque(double beta, const LegParams& p) { return p.k * p.r_k * p.r_k * (p.beta0 - beta); }

double damper_torque(double betadot, const DamperSpec& spec, const LegParams& p) {
  if (betadot >= 0.0 || -betadot < spec.velocity_deadband) {
    return 0.0;
  }
  // sign(betadot) = -1 here
  return spec.dc * p.r_d - spec.dv * p.r_d * p.r_d * betadot;
}

double knee_torque(double beta, double betadot, const DamperSpec& spec, const LegParams& p) {
  return spring_torque(beta, p) + damper_torque(betadot, spec, p);
}

double leg_force(double y, double beta, double tau, const LegParams& p) {
  if (y > p.rest_length()) {
    return 0.0;
  }
  const double s = std::sin(beta);
  if (std::abs(s) < kSingularSin) {
    throw SingularityError("leg_force: singular knee angle " + std::to_string(beta));
  }
  return y * tau / (p.lambda1 * p.lambda2 * s);
}

}  // namespace legdamp
