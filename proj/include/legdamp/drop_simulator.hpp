#pragma once

// One vertical drop of the damped two-segment leg: ballistic flight in closed
// form, then stance integrated in (y, ydot) with an adaptive Dormand-Prince
// stepper until lift-off, settling, or bottom-out.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "legdamp/leg_model.hpp"

namespace legdamp {

enum class Phase { flight, stance_flexion, stance_extension };
enum class EventKind { touch_down, max_compression, max_extension, lift_off, settled, bottom_out };
enum class Outcome { lifted_off, settled, bottomed_out };

std::string_view to_string(Phase phase);
std::string_view to_string(EventKind kind);
std::string_view to_string(Outcome outcome);

struct SolverSettings {
  double abs_tol = 1e-5;
  double rel_tol = 1e-5;
  double max_step = 1e-5;           // s
  double max_sim_time = 2.0;        // s, measured from release
  double settle_speed_eps = 1e-3;   // m/s
  double settle_duration = 0.05;    // s
  double beta_min = deg_to_rad(10.0);

  void validate(const LegParams& params) const;
};

struct DropConfig {
  double h = 0.14;   // foot clearance at release [m]
  double h0 = 0.14;  // reference drop height [m]
  SolverSettings solver;
  double flight_sample_interval = 1e-3;  // s, spacing of the closed-form flight samples

  void validate(const LegParams& params) const;
};

struct TrajectorySample {
  double t = 0.0;
  double y = 0.0;
  double ydot = 0.0;
  double beta = 0.0;
  double betadot = 0.0;
  double leg_force = 0.0;
  double damper_torque = 0.0;
  Phase phase = Phase::flight;
  double dissipated = 0.0;  // cumulative damper work since touch-down [J]
};

struct TrajectoryEvent {
  EventKind kind;
  double t;
};

struct SimTrajectory {
  std::vector<TrajectorySample> samples;
  std::vector<TrajectoryEvent> events;

  /// Contiguous run of stance samples (touch-down first). Empty if there is none.
  std::span<const TrajectorySample> stance() const;
  std::optional<double> event_time(EventKind kind) const;
};

struct DropSummary {
  double h = 0.0;
  double touchdown_speed = 0.0;   // m/s, magnitude
  double release_energy = 0.0;    // J, m g h
  double dissipated_energy = 0.0; // J
  std::optional<double> liftoff_speed;
  double max_compression = 0.0;   // m, minimum leg length reached
  double stance_duration = 0.0;   // s
  Outcome outcome = Outcome::lifted_off;
};

struct DropResult {
  SimTrajectory trajectory;
  DropSummary summary;
};

struct StanceRates {
  double dy = 0.0;
  double dydot = 0.0;
  double dissipation = 0.0;  // -tau_d * betadot, W
};

/// State at touch-down after a ballistic fall from clearance h.
StanceState touchdown_state(double h, const LegParams& params);

/// Completes (beta, betadot) from (y, ydot) through the contact constraint.
StanceState stance_state(double y, double ydot, const LegParams& params);

/// Right-hand side of the stance dynamics. Only state.y and state.ydot are read;
/// beta and betadot are recomputed from the constraint.
StanceRates stance_rhs(const StanceState& state, const LegParams& params, const DamperSpec& spec);

/// Mechanical energy in stance relative to the touch-down datum:
/// 1/2 m ydot^2 + m g (y - l0) + 1/2 k r_k^2 (beta0 - beta)^2.
double stance_energy(const StanceState& state, const LegParams& params);

/// Leg length at which the spring alone carries m g, if it exists above beta_min.
std::optional<double> static_equilibrium_length(const LegParams& params, double beta_min);

DropResult simulate_drop(const LegParams& params, const DamperSpec& spec, const DropConfig& cfg);

}  // namespace legdamp
