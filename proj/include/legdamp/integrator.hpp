#pragma once

// Explicit Runge-Kutta steppers on small fixed-size states.
//
// dopri5_step is the Dormand-Prince 5(4) pair (the tableau behind ode45); the
// embedded 4th-order solution gives the local error estimate used by the
// adaptive controller in the drop simulator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace legdamp::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, const Vec<N>& k) {
  Vec<N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
  return out;
}

template <std::size_t N>
struct StepResult {
  Vec<N> y;
  Vec<N> error;  // y5 - y4
};

template <std::size_t N, class Rhs>
StepResult<N> dopri5_step(Rhs&& f, const Vec<N>& y, double h) {
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                   a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                   e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  const Vec<N> k1 = f(y);
  Vec<N> tmp{};
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  const Vec<N> k2 = f(tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  const Vec<N> k3 = f(tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  const Vec<N> k4 = f(tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  const Vec<N> k5 = f(tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  const Vec<N> k6 = f(tmp);

  StepResult<N> out{};
  for (std::size_t i = 0; i < N; ++i)
    out.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  const Vec<N> k7 = f(out.y);
  for (std::size_t i = 0; i < N; ++i)
    out.error[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  return out;
}

/// Classic fixed-step RK4.
template <std::size_t N, class Rhs>
Vec<N> rk4_step(Rhs&& f, const Vec<N>& y, double h) {
  const Vec<N> k1 = f(y);
  const Vec<N> k2 = f(axpy(y, 0.5 * h, k1));
  const Vec<N> k3 = f(axpy(y, 0.5 * h, k2));
  const Vec<N> k4 = f(axpy(y, h, k3));
  Vec<N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

/// Mixed absolute/relative max-norm of the local error; <= 1 means accept.
template <std::size_t N>
double error_norm(const StepResult<N>& step, const Vec<N>& y0, double abs_tol, double rel_tol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double scale = abs_tol + rel_tol * std::max(std::abs(y0[i]), std::abs(step.y[i]));
    worst = std::max(worst, std::abs(step.error[i]) / scale);
  }
  return worst;
}

/// Step-size factor from a 5th-order error estimate, clamped to [0.2, 5].
inline double step_factor(double err_norm) {
  if (err_norm == 0.0) return 5.0;
  return std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
}

}  // namespace legdamp::ode
