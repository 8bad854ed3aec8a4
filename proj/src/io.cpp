#include "legdamp/io.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "legdamp/errors.hpp"

namespace legdamp::io {

namespace {

void comment_block(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

void full_precision(std::ostream& out) { out << std::setprecision(std::numeric_limits<double>::max_digits10); }

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

void write_trajectory_csv(std::ostream& out, const SimTrajectory& traj, const std::vector<std::string>& comments) {
  comment_block(out, comments);
  out << "t,y,ydot,beta,betadot,F_leg,tau_d,phase\n";
  full_precision(out);
  for (const auto& s : traj.samples) {
    out << s.t << ',' << s.y << ',' << s.ydot << ',' << s.beta << ',' << s.betadot << ',' << s.leg_force << ','
        << s.damper_torque << ',' << to_string(s.phase) << '\n';
  }
}

void write_events_csv(std::ostream& out, const SimTrajectory& traj) {
  out << "event,t_s\n";
  full_precision(out);
  for (const auto& e : traj.events) out << to_string(e.kind) << ',' << e.t << '\n';
}

Json events_json(const SimTrajectory& traj) {
  Json arr = Json::array();
  for (const auto& e : traj.events) arr.push_back({{"event", std::string(to_string(e.kind))}, {"t_s", e.t}});
  return arr;
}

Json summary_json(const DropSummary& s) {
  Json j;
  j["h_m"] = s.h;
  j["v_td_mps"] = s.touchdown_speed;
  j["E_T_J"] = s.release_energy;
  j["E_D_J"] = s.dissipated_energy;
  j["v_lo_mps"] = s.liftoff_speed ? Json(*s.liftoff_speed) : Json(nullptr);
  j["max_compression_m"] = s.max_compression;
  j["stance_duration_s"] = s.stance_duration;
  j["outcome"] = std::string(to_string(s.outcome));
  return j;
}

void write_workloop_csv(std::ostream& out, const WorkLoop& loop, const std::vector<std::string>& comments) {
  comment_block(out, comments);
  out << "leg_length_m,force_N\n";
  full_precision(out);
  for (const auto& p : loop.points) out << p.length << ',' << p.force << '\n';
}

WorkLoop read_workloop_csv(std::istream& in, const std::string& source) {
  WorkLoop loop;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "leg_length_m,force_N") throw ParseError(source, lineno, "expected header 'leg_length_m,force_N'");
      header = true;
      continue;
    }
    std::istringstream row(line);
    double l = 0.0, f = 0.0;
    char comma = 0;
    if (!(row >> l >> comma >> f) || comma != ',' || !std::isfinite(l) || !std::isfinite(f)) {
      throw ParseError(source, lineno, "malformed row");
    }
    loop.points.push_back({l, f});
  }
  if (!header) throw ParseError(source, 0, "empty file (no header)");
  return loop;
}

Json breakdown_json(const EnergyBreakdown& b) {
  Json j;
  j["effective_J"] = b.effective;
  j["cfriction_J"] = b.cfriction;
  j["impact_J"] = b.impact;
  j["viscous_J"] = b.viscous;
  return j;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const std::vector<std::string>& comments) {
  comment_block(out, comments);
  out << "set,mode,coefficient,h_m,delta_h_m,E_D_J,delta_E_D_J,ratio,outcome\n";
  full_precision(out);
  for (const auto& c : sweep.cells) {
    out << c.set << ',' << to_string(c.mode) << ',' << c.coefficient << ',' << c.h << ',' << c.delta_h << ','
        << c.dissipated << ',' << c.delta_dissipated << ',';
    if (std::isfinite(c.ratio)) out << c.ratio;
    out << ',' << to_string(c.outcome) << '\n';
  }
}

Json sweep_json(const SweepResult& sweep) {
  Json sets = Json::object();
  for (const auto& c : sweep.cells) {
    Json& mode = sets[std::to_string(c.set)][std::string(to_string(c.mode))];
    mode["coefficient"] = c.coefficient;
    mode["unit"] = c.mode == DampingMode::viscous ? "N s/m" : "N";
    mode["cells"].push_back({{"h_m", c.h},
                             {"delta_h_m", c.delta_h},
                             {"E_D_J", c.dissipated},
                             {"delta_E_D_J", c.delta_dissipated},
                             {"ratio", number_or_null(c.ratio)},
                             {"outcome", std::string(to_string(c.outcome))}});
  }
  return Json{{"sets", sets}};
}

void write_delta_curve_csv(std::ostream& out, const std::vector<DeltaCurvePoint>& curve,
                           const std::vector<std::string>& comments) {
  comment_block(out, comments);
  out << "delta_h_m,delta_E_D_J,full_rejection_J\n";
  full_precision(out);
  for (const auto& p : curve) out << p.delta_h << ',' << p.delta_dissipated << ',' << p.full_rejection << '\n';
}

void write_envelope_csv(std::ostream& out, const Envelope& env, const std::vector<std::string>& comments) {
  comment_block(out, comments);
  out << "t,mean,lo,hi\n";
  full_precision(out);
  for (std::size_t i = 0; i < env.t.size(); ++i) {
    out << env.t[i] << ',' << env.mean[i] << ',' << env.lo(i) << ',' << env.hi(i) << '\n';
  }
}

Json damper_fit_json(const DamperFit& fit) {
  Json j;
  j["damping_rate_Nspm"] = fit.damping_rate;
  j["intercept_N"] = fit.intercept;
  j["window_mps"] = {fit.window_lo, fit.window_hi};
  j["residual_rms_N"] = fit.residual_rms;
  j["dissipated_work_J"] = fit.dissipated_work;
  j["points"] = fit.points;
  return j;
}

Json to_json(const LegParams& p) {
  return Json{{"mass", p.mass}, {"lambda1", p.lambda1}, {"lambda2", p.lambda2}, {"k", p.k},
              {"r_k", p.r_k},   {"r_d", p.r_d},         {"beta0", p.beta0},     {"g", p.g}};
}

Json to_json(const DamperSpec& s) { return Json{{"dv", s.dv}, {"dc", s.dc}, {"deadband", s.velocity_deadband}}; }

Json to_json(const DropConfig& c) {
  return Json{{"height", c.h},
              {"h0", c.h0},
              {"abs_tol", c.solver.abs_tol},
              {"rel_tol", c.solver.rel_tol},
              {"max_step", c.solver.max_step},
              {"max_sim_time", c.solver.max_sim_time},
              {"settle_speed_eps", c.solver.settle_speed_eps},
              {"settle_duration", c.solver.settle_duration},
              {"beta_min", c.solver.beta_min}};
}

}  // namespace legdamp::io
