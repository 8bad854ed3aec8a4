#pragma once

#include <vector>

#include "legdamp/drop_simulator.hpp"
#include "legdamp/leg_model.hpp"

namespace legdamp {

struct LoopPoint {
  double length = 0.0;  // m
  double force = 0.0;   // N
};

/// Force-length curve over one stance, ordered by time. The polygon is closed
/// implicitly (last point back to first) when computing its area.
struct WorkLoop {
  std::vector<LoopPoint> points;
  bool closed = false;  // true if the last point was already placed on the first

  std::size_t size() const { return points.size(); }
  double min_length() const;
  double max_length() const;
};

/// Four-way split of the measured loop energy; viscous is the remainder, chosen so
/// that total() equals effective exactly.
struct EnergyBreakdown {
  double effective = 0.0;
  double cfriction = 0.0;
  double impact = 0.0;
  double viscous = 0.0;

  /// false when the remainder came out negative, i.e. the inputs disagree.
  bool consistent() const { return viscous >= 0.0; }
  double total() const { return viscous + (cfriction + impact); }
};

/// Trapezoidal integral of -tau_d * betadot over the stance samples [J].
/// Throws AnalysisError when the trajectory has fewer than two stance samples.
double dissipated_energy(const SimTrajectory& traj);

/// Change of dissipation caused by a drop-height perturbation.
double delta_dissipation(double perturbed, double reference);

/// m g dh, the dissipation change that would cancel a height perturbation completely.
double full_rejection(double delta_h, const LegParams& params);

WorkLoop workloop_from_trajectory(const SimTrajectory& traj);

/// Signed shoelace area in J (m * N). Counter-clockwise loops, i.e. loading
/// above unloading, are positive. Throws AnalysisError for fewer than 3 points.
double loop_area(const WorkLoop& loop);

/// -integral of F dl/dt over time for the same samples. Independent check on loop_area.
double loop_work_time_domain(const SimTrajectory& traj);

EnergyBreakdown decompose_energy(double effective, double cfriction, double impact);

/// Drops slow-loop samples that compress beyond the free loop's maximum compression.
WorkLoop truncate_to_max_compression(const WorkLoop& slow, const WorkLoop& free);

/// Worst deviation, over all stance samples, of the mechanical energy balance
/// E(t) - E(td) + dissipated(t) from zero [J].
double energy_audit_residual(const SimTrajectory& traj, const LegParams& params);

}  // namespace legdamp
