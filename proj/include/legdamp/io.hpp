#pragma once

// File formats: trajectory / work-loop / sweep / envelope CSV and the JSON
// documents for summaries, events, energy breakdowns and damper fits.
// CSV files may start with '#' comment lines (resolved configuration); the
// first non-comment line is the header. All values are SI.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "legdamp/calibration.hpp"
#include "legdamp/drop_simulator.hpp"
#include "legdamp/energy.hpp"
#include "legdamp/exp_data.hpp"

namespace legdamp::io {

using Json = nlohmann::ordered_json;

/// Columns t,y,ydot,beta,betadot,F_leg,tau_d,phase.
void write_trajectory_csv(std::ostream& out, const SimTrajectory& traj, const std::vector<std::string>& comments = {});

/// Columns event,t_s.
void write_events_csv(std::ostream& out, const SimTrajectory& traj);
Json events_json(const SimTrajectory& traj);

Json summary_json(const DropSummary& summary);

/// Columns leg_length_m,force_N.
void write_workloop_csv(std::ostream& out, const WorkLoop& loop, const std::vector<std::string>& comments = {});
WorkLoop read_workloop_csv(std::istream& in, const std::string& source);

/// Keys effective_J, cfriction_J, impact_J, viscous_J.
Json breakdown_json(const EnergyBreakdown& breakdown);

/// One row per cell: set,mode,coefficient,h_m,delta_h_m,E_D_J,delta_E_D_J,ratio,outcome.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const std::vector<std::string>& comments = {});
/// Nested as {"sets": {"1": {"viscous": {...,"cells":[...]}, "coulomb": {...}}}}.
Json sweep_json(const SweepResult& sweep);

/// Columns delta_h_m,delta_E_D_J,full_rejection_J.
void write_delta_curve_csv(std::ostream& out, const std::vector<DeltaCurvePoint>& curve,
                           const std::vector<std::string>& comments = {});

/// Columns t,mean,lo,hi.
void write_envelope_csv(std::ostream& out, const Envelope& env, const std::vector<std::string>& comments = {});

Json damper_fit_json(const DamperFit& fit);

Json to_json(const LegParams& params);
Json to_json(const DamperSpec& spec);
Json to_json(const DropConfig& cfg);

}  // namespace legdamp::io
