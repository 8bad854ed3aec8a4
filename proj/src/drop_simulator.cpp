#include "legdamp/drop_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "legdamp/errors.hpp"
#include "legdamp/integrator.hpp"

namespace legdamp {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::flight: return "flight";
    case Phase::stance_flexion: return "stance-flexion";
    case Phase::stance_extension: return "stance-extension";
  }
  return "?";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::touch_down: return "touch-down";
    case EventKind::max_compression: return "max-compression";
    case EventKind::max_extension: return "max-extension";
    case EventKind::lift_off: return "lift-off";
    case EventKind::settled: return "settled";
    case EventKind::bottom_out: return "bottom-out";
  }
  return "?";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::lifted_off: return "lifted-off";
    case Outcome::settled: return "settled";
    case Outcome::bottomed_out: return "bottomed-out";
  }
  return "?";
}

void SolverSettings::validate(const LegParams& params) const {
  auto positive = [](const char* field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field, "must be a finite value > 0");
  };
  positive("abs_tol", abs_tol);
  positive("rel_tol", rel_tol);
  positive("max_step", max_step);
  positive("max_sim_time", max_sim_time);
  positive("settle_speed_eps", settle_speed_eps);
  positive("settle_duration", settle_duration);
  if (!(beta_min > 0.0 && beta_min < params.beta0)) {
    throw ValidationError("beta_min", "must lie in (0, beta0)");
  }
}

void DropConfig::validate(const LegParams& params) const {
  if (!(h >= 0.0) || !std::isfinite(h)) throw ValidationError("height", "drop height must be >= 0");
  if (!(h0 > 0.0) || !std::isfinite(h0)) throw ValidationError("h0", "reference height must be > 0");
  if (!(flight_sample_interval > 0.0)) throw ValidationError("flight_sample_interval", "must be > 0");
  solver.validate(params);
}

std::span<const TrajectorySample> SimTrajectory::stance() const {
  auto first = std::find_if(samples.begin(), samples.end(),
                            [](const TrajectorySample& s) { return s.phase != Phase::flight; });
  auto last = std::find_if(first, samples.end(), [](const TrajectorySample& s) { return s.phase == Phase::flight; });
  return {first, last};
}

std::optional<double> SimTrajectory::event_time(EventKind kind) const {
  for (const auto& e : events) {
    if (e.kind == kind) return e.t;
  }
  return std::nullopt;
}

StanceState touchdown_state(double h, const LegParams& params) {
  if (!(h >= 0.0)) throw DomainError("touchdown_state: negative drop height");
  StanceState s;
  s.y = params.rest_length();
  s.ydot = -std::sqrt(2.0 * params.g * h);
  s.beta = params.beta0;
  s.betadot = betadot_from(s.y, s.ydot, params);
  return s;
}

StanceState stance_state(double y, double ydot, const LegParams& params) {
  return {y, ydot, beta_from_length(y, params), betadot_from(y, ydot, params)};
}

StanceRates stance_rhs(const StanceState& state, const LegParams& params, const DamperSpec& spec) {
  const StanceState s = stance_state(state.y, state.ydot, params);
  const double tau_d = damper_torque(s.betadot, spec, params);
  const double tau = spring_torque(s.beta, params) + tau_d;
  const double force = leg_force(s.y, s.beta, tau, params);
  const bool contact = s.y <= params.rest_length();
  return {s.ydot, force / params.mass - params.g, contact ? -tau_d * s.betadot : 0.0};
}

double stance_energy(const StanceState& state, const LegParams& params) {
  const double l0 = params.rest_length();
  const double beta = beta_from_length(state.y, params);
  const double spring = 0.5 * params.k * params.r_k * params.r_k * (params.beta0 - beta) * (params.beta0 - beta);
  return 0.5 * params.mass * state.ydot * state.ydot + params.mass * params.g * (state.y - l0) + spring;
}

std::optional<double> static_equilibrium_length(const LegParams& params, double beta_min) {
  const double weight = params.mass * params.g;
  auto excess = [&](double beta) {
    const double y = leg_length(beta, params);
    return leg_force(y, beta, spring_torque(beta, params), params) - weight;
  };
  double lo = beta_min;         // spring force should exceed the weight here
  double hi = params.beta0;     // spring force is zero here
  if (excess(lo) < 0.0) return std::nullopt;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) >= 0.0 ? lo : hi) = mid;
  }
  return leg_length(0.5 * (lo + hi), params);
}

namespace {

using Vec3 = ode::Vec<3>;  // y, ydot, dissipated work

TrajectorySample make_sample(double t, const Vec3& x, Phase phase, const LegParams& params, const DamperSpec& spec) {
  TrajectorySample s;
  s.t = t;
  s.y = x[0];
  s.ydot = x[1];
  s.phase = phase;
  s.dissipated = x[2];
  s.beta = beta_from_length(x[0], params);
  s.betadot = betadot_from(x[0], x[1], params);
  s.damper_torque = damper_torque(s.betadot, spec, params);
  s.leg_force = leg_force(s.y, s.beta, spring_torque(s.beta, params) + s.damper_torque, params);
  return s;
}

struct EventCheck {
  EventKind kind;
  std::function<bool(const Vec3&)> after;
};

DropResult quasi_static_settle(const LegParams& params, const DropConfig& cfg) {
  DropResult out;
  const double l0 = params.rest_length();
  const auto y_eq = static_equilibrium_length(params, cfg.solver.beta_min);
  const double y_end = y_eq.value_or(leg_length(cfg.solver.beta_min, params));
  const double duration = cfg.solver.settle_duration;
  constexpr int kSteps = 20;
  for (int i = 0; i <= kSteps; ++i) {
    const double frac = static_cast<double>(i) / kSteps;
    TrajectorySample s;
    s.t = frac * duration;
    s.y = l0 + frac * (y_end - l0);
    s.beta = beta_from_length(s.y, params);
    s.leg_force = leg_force(s.y, s.beta, spring_torque(s.beta, params), params);
    s.phase = Phase::stance_flexion;
    out.trajectory.samples.push_back(s);
  }
  out.trajectory.events.push_back({EventKind::touch_down, 0.0});
  const Outcome outcome = y_eq ? Outcome::settled : Outcome::bottomed_out;
  out.trajectory.events.push_back({y_eq ? EventKind::settled : EventKind::bottom_out, duration});
  out.summary.h = 0.0;
  out.summary.max_compression = y_end;
  out.summary.stance_duration = duration;
  out.summary.outcome = outcome;
  return out;
}

}  // namespace

DropResult simulate_drop(const LegParams& params, const DamperSpec& spec, const DropConfig& cfg) {
  params.validate();
  spec.validate();
  cfg.validate(params);
  if (cfg.h == 0.0) return quasi_static_settle(params, cfg);

  const SolverSettings& solver = cfg.solver;
  const double l0 = params.rest_length();
  const double reach = params.lambda1 + params.lambda2;
  const double t_td = std::sqrt(2.0 * cfg.h / params.g);
  const double v_td = std::sqrt(2.0 * params.g * cfg.h);

  DropResult out;
  auto& samples = out.trajectory.samples;
  auto& events = out.trajectory.events;
  samples.reserve(static_cast<std::size_t>(t_td / cfg.flight_sample_interval) + 8192);

  for (int i = 0;; ++i) {
    const double t = i * cfg.flight_sample_interval;
    if (t >= t_td) break;
    TrajectorySample s;
    s.t = t;
    s.y = l0 + cfg.h - 0.5 * params.g * t * t;
    s.ydot = -params.g * t;
    s.beta = params.beta0;
    s.phase = Phase::flight;
    samples.push_back(s);
  }

  auto rhs = [&](const Vec3& x) -> Vec3 {
    if (!(x[0] > 0.0 && x[0] < reach) || !std::isfinite(x[1])) {
      constexpr double nan = std::numeric_limits<double>::quiet_NaN();
      return {nan, nan, nan};
    }
    const StanceRates r = stance_rhs({x[0], x[1], 0.0, 0.0}, params, spec);
    return {r.dy, r.dydot, r.dissipation};
  };

  const double bottom_length = leg_length(solver.beta_min, params);
  const std::vector<EventCheck> flexion_events{
      {EventKind::bottom_out, [bottom_length](const Vec3& x) { return x[0] < bottom_length; }},
      {EventKind::max_compression, [](const Vec3& x) { return x[1] >= 0.0; }},
  };
  const std::vector<EventCheck> extension_events{
      {EventKind::bottom_out, [bottom_length](const Vec3& x) { return x[0] < bottom_length; }},
      {EventKind::lift_off, [l0](const Vec3& x) { return x[0] >= l0 && x[1] > 0.0; }},
      {EventKind::max_extension, [](const Vec3& x) { return x[1] < 0.0; }},
  };

  Vec3 x{l0, -v_td, 0.0};
  double t = t_td;
  Phase phase = Phase::stance_flexion;
  samples.push_back(make_sample(t, x, phase, params, spec));
  events.push_back({EventKind::touch_down, t});

  const double event_tol = 1e-4 * solver.max_step;
  double h = std::min(solver.max_step, 1e-4);
  std::optional<double> still_since;
  std::optional<Outcome> outcome;

  while (!outcome) {
    if (t >= solver.max_sim_time) {
      throw IntegrationError("simulate_drop: no lift-off or settling within max_sim_time = " +
                             std::to_string(solver.max_sim_time) + " s");
    }
    h = std::min(h, solver.max_step);
    const auto step = ode::dopri5_step<3>(rhs, x, h);
    const double err = ode::error_norm(step, x, solver.abs_tol, solver.rel_tol);
    if (!std::isfinite(err) || err > 1.0) {
      h *= std::isfinite(err) ? ode::step_factor(err) : 0.25;
      if (h < 1e-14) {
        throw IntegrationError("simulate_drop: step size underflow at t = " + std::to_string(t) + " s");
      }
      continue;
    }

    // Earliest event inside the accepted step, located by bisection on the step fraction.
    const auto& checks = phase == Phase::stance_flexion ? flexion_events : extension_events;
    std::optional<EventKind> fired;
    double fired_frac = 1.0;
    Vec3 fired_state = step.y;
    for (const auto& check : checks) {
      if (check.after(x) || !check.after(step.y)) continue;
      double lo = 0.0, hi = 1.0;
      Vec3 hi_state = step.y;
      while ((hi - lo) * h > event_tol) {
        const double mid = 0.5 * (lo + hi);
        const Vec3 mid_state = ode::dopri5_step<3>(rhs, x, mid * h).y;
        if (check.after(mid_state)) {
          hi = mid;
          hi_state = mid_state;
        } else {
          lo = mid;
        }
      }
      if (!fired || hi < fired_frac) {
        fired = check.kind;
        fired_frac = hi;
        fired_state = hi_state;
      }
    }

    const double t_new = t + fired_frac * h;
    const Vec3 x_new = fired ? fired_state : step.y;
    for (double v : x_new) {
      if (!std::isfinite(v)) throw IntegrationError("simulate_drop: non-finite state at t = " + std::to_string(t_new));
    }
    t = t_new;
    x = x_new;
    samples.push_back(make_sample(t, x, phase, params, spec));

    if (fired) {
      events.push_back({*fired, t});
      switch (*fired) {
        case EventKind::max_compression: phase = Phase::stance_extension; break;
        case EventKind::max_extension: phase = Phase::stance_flexion; break;
        case EventKind::lift_off: outcome = Outcome::lifted_off; break;
        case EventKind::bottom_out: outcome = Outcome::bottomed_out; break;
        default: break;
      }
    }

    if (!outcome) {
      if (std::abs(x[1]) < solver.settle_speed_eps && x[0] < l0) {
        if (!still_since) still_since = t;
        if (t - *still_since >= solver.settle_duration) {
          events.push_back({EventKind::settled, t});
          outcome = Outcome::settled;
        }
      } else {
        still_since.reset();
      }
    }
    if (!fired) h *= ode::step_factor(err);
  }

  DropSummary& sum = out.summary;
  sum.h = cfg.h;
  sum.touchdown_speed = v_td;
  sum.release_energy = params.mass * params.g * cfg.h;
  sum.dissipated_energy = x[2];
  sum.outcome = *outcome;
  if (*outcome == Outcome::lifted_off) sum.liftoff_speed = x[1];
  sum.stance_duration = t - t_td;
  sum.max_compression = l0;
  for (const auto& s : out.trajectory.stance()) sum.max_compression = std::min(sum.max_compression, s.y);
  return out;
}

}  // namespace legdamp
