#include "legdamp/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "legdamp/errors.hpp"

namespace legdamp {

double WorkLoop::min_length() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : points) m = std::min(m, p.length);
  return m;
}

double WorkLoop::max_length() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) m = std::max(m, p.length);
  return m;
}

double dissipated_energy(const SimTrajectory& traj) {
  const auto stance = traj.stance();
  if (stance.size() < 2) throw AnalysisError("dissipated_energy: trajectory has no stance segment");
  double sum = 0.0;
  for (std::size_t i = 1; i < stance.size(); ++i) {
    const double p0 = -stance[i - 1].damper_torque * stance[i - 1].betadot;
    const double p1 = -stance[i].damper_torque * stance[i].betadot;
    sum += 0.5 * (p0 + p1) * (stance[i].t - stance[i - 1].t);
  }
  return std::max(sum, 0.0);
}

double delta_dissipation(double perturbed, double reference) { return perturbed - reference; }

double full_rejection(double delta_h, const LegParams& params) { return params.mass * params.g * delta_h; }

WorkLoop workloop_from_trajectory(const SimTrajectory& traj) {
  WorkLoop loop;
  for (const auto& s : traj.stance()) loop.points.push_back({s.y, s.leg_force});
  return loop;
}

double loop_area(const WorkLoop& loop) {
  const auto& pts = loop.points;
  if (pts.size() < 3) throw AnalysisError("loop_area: need at least 3 points, got " + std::to_string(pts.size()));
  // Shoelace on coordinates shifted to the first point keeps cancellation error small.
  const double x0 = pts.front().length, y0 = pts.front().force;
  double twice = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % pts.size()];
    twice += (a.length - x0) * (b.force - y0) - (b.length - x0) * (a.force - y0);
  }
  return 0.5 * twice;
}

double loop_work_time_domain(const SimTrajectory& traj) {
  const auto stance = traj.stance();
  if (stance.size() < 2) throw AnalysisError("loop_work_time_domain: trajectory has no stance segment");
  double sum = 0.0;
  for (std::size_t i = 1; i < stance.size(); ++i) {
    const double p0 = stance[i - 1].leg_force * stance[i - 1].ydot;
    const double p1 = stance[i].leg_force * stance[i].ydot;
    sum += 0.5 * (p0 + p1) * (stance[i].t - stance[i - 1].t);
  }
  return -sum;
}

EnergyBreakdown decompose_energy(double effective, double cfriction, double impact) {
  const double known = cfriction + impact;
  double viscous = effective - known;
  // Nudge the remainder by a few ulps so total() gives effective back exactly.
  for (int i = 0; i < 8; ++i) {
    const double sum = viscous + known;
    if (sum == effective || !std::isfinite(sum)) break;
    viscous = std::nextafter(viscous, sum < effective ? std::numeric_limits<double>::infinity()
                                                      : -std::numeric_limits<double>::infinity());
  }
  return {effective, cfriction, impact, viscous};
}

WorkLoop truncate_to_max_compression(const WorkLoop& slow, const WorkLoop& free) {
  if (slow.points.empty() || free.points.empty()) {
    throw AnalysisError("truncate_to_max_compression: empty loop");
  }
  const double cut = free.min_length();
  if (slow.max_length() < cut || slow.min_length() > free.max_length()) {
    throw AnalysisError("truncate_to_max_compression: slow and free loops cover disjoint leg-length ranges");
  }
  WorkLoop out;
  out.closed = false;
  std::copy_if(slow.points.begin(), slow.points.end(), std::back_inserter(out.points),
               [cut](const LoopPoint& p) { return p.length >= cut; });
  return out;
}

double energy_audit_residual(const SimTrajectory& traj, const LegParams& params) {
  const auto stance = traj.stance();
  if (stance.empty()) return 0.0;
  auto energy = [&](const TrajectorySample& s) { return stance_energy({s.y, s.ydot, s.beta, s.betadot}, params); };
  const double e_td = energy(stance.front());
  double worst = 0.0;
  for (const auto& s : stance) {
    worst = std::max(worst, std::abs(energy(s) - e_td + s.dissipated));
  }
  return worst;
}

}  // namespace legdamp
