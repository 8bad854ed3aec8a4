#pragma once
// Independent reference computations for the test suites. Nothing here calls
// into the library's dynamics: the stance oracle integrates the knee angle
// directly from the Lagrangian of the hip mass on a two-segment leg, with the
// spring and damper torques written out again from their definitions.

#include <cmath>
#include <optional>

#include "legdamp/leg_model.hpp"

namespace oracle {

struct Geometry {
  double l;    // leg length
  double dl;   // dl/dbeta
  double ddl;  // d2l/dbeta2
};

inline Geometry geometry(double beta, double l1, double l2) {
  const double a = l1 * l2;
  const double l = std::sqrt(l1 * l1 + l2 * l2 - 2.0 * a * std::cos(beta));
  const double dl = a * std::sin(beta) / l;
  const double ddl = a * std::cos(beta) / l - dl * dl / l;
  return {l, dl, ddl};
}

// Torque the damper applies on the knee angle; positive resists flexion.
inline double damper(double betadot, double dv, double dc, double r_d) {
  if (betadot >= 0.0) return 0.0;
  return dc * r_d + dv * r_d * r_d * (-betadot);
}

struct StanceOutcome {
  double dissipated = 0.0;  // J
  double liftoff_speed = 0.0;
  double min_length = 0.0;
  double duration = 0.0;
};

// Fixed-step RK4 on (beta, betadot, work) from touch-down until the knee
// returns to its resting angle while extending:
//   m l'^2 beta'' + m l' l'' beta'^2 = k r_k^2 (beta0 - beta) + tau_d - m g l'
inline std::optional<StanceOutcome> stance_rk4(const legdamp::LegParams& p, double dv, double dc, double h,
                                               double dt = 1e-6, double t_max = 1.0) {
  const double kt = p.k * p.r_k * p.r_k;
  auto rhs = [&](const double s[3], double out[3]) {
    const Geometry g = geometry(s[0], p.lambda1, p.lambda2);
    const double tau_d = damper(s[1], dv, dc, p.r_d);
    const double tau = kt * (p.beta0 - s[0]) + tau_d;
    out[0] = s[1];
    out[1] = (tau - p.mass * p.g * g.dl - p.mass * g.dl * g.ddl * s[1] * s[1]) / (p.mass * g.dl * g.dl);
    out[2] = -tau_d * s[1];
  };

  const Geometry g0 = geometry(p.beta0, p.lambda1, p.lambda2);
  const double v_td = std::sqrt(2.0 * p.g * h);
  double s[3] = {p.beta0, -v_td / g0.dl, 0.0};
  double min_len = g0.l;
  double t = 0.0;
  while (t < t_max) {
    double k1[3], k2[3], k3[3], k4[3], tmp[3];
    rhs(s, k1);
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
    rhs(tmp, k2);
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
    rhs(tmp, k3);
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + dt * k3[i];
    rhs(tmp, k4);
    double next[3];
    for (int i = 0; i < 3; ++i) next[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t += dt;
    min_len = std::min(min_len, geometry(next[0], p.lambda1, p.lambda2).l);
    if (next[0] >= p.beta0 && next[1] > 0.0 && t > 10.0 * dt) {
      // Linear interpolation to the crossing.
      const double f = (p.beta0 - s[0]) / (next[0] - s[0]);
      StanceOutcome out;
      out.dissipated = s[2] + f * (next[2] - s[2]);
      const double bd = s[1] + f * (next[1] - s[1]);
      out.liftoff_speed = bd * g0.dl;
      out.min_length = min_len;
      out.duration = t - dt + f * dt;
      return out;
    }
    for (int i = 0; i < 3; ++i) s[i] = next[i];
  }
  return std::nullopt;
}

// Shoelace area of an explicit polygon, closed implicitly.
template <class Xs, class Ys>
double polygon_area(const Xs& x, const Ys& y) {
  double twice = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    twice += x[i] * y[j] - x[j] * y[i];
  }
  return 0.5 * twice;
}

}  // namespace oracle
