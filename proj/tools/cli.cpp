#include "cli.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "legdamp/calibration.hpp"
#include "legdamp/drop_simulator.hpp"
#include "legdamp/energy.hpp"
#include "legdamp/errors.hpp"
#include "legdamp/exp_data.hpp"
#include "legdamp/io.hpp"
#include "legdamp/stats.hpp"

namespace legdamp::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct Resolved {
  LegParams params;
  DamperSpec spec;
  DropConfig drop;
};

// One overridable numeric quantity: config-file key, command-line flag, and
// where it lands in the resolved configuration.
struct Key {
  const char* name;
  const char* flag;
  const char* help;
  void (*apply)(Resolved&, double);
};

const std::array<Key, 21> kKeys{{
    {"mass", "--mass", "Hip mass [kg]", [](Resolved& r, double v) { r.params.mass = v; }},
    {"lambda1", "--lambda1", "Upper segment length [m]", [](Resolved& r, double v) { r.params.lambda1 = v; }},
    {"lambda2", "--lambda2", "Lower segment length [m]", [](Resolved& r, double v) { r.params.lambda2 = v; }},
    {"k", "--k", "Knee spring stiffness [N/m]", [](Resolved& r, double v) { r.params.k = v; }},
    {"r_k", "--r-k", "Spring lever arm [m]", [](Resolved& r, double v) { r.params.r_k = v; }},
    {"r_d", "--r-d", "Damper lever arm [m]", [](Resolved& r, double v) { r.params.r_d = v; }},
    {"beta0", "--beta0", "Knee resting angle [rad]", [](Resolved& r, double v) { r.params.beta0 = v; }},
    {"beta0_deg", "--beta0-deg", "Knee resting angle [deg]",
     [](Resolved& r, double v) { r.params.beta0 = deg_to_rad(v); }},
    {"g", "--g", "Gravitational acceleration [m/s^2]", [](Resolved& r, double v) { r.params.g = v; }},
    {"dv", "--dv", "Viscous damping coefficient [N s/m]", [](Resolved& r, double v) { r.spec.dv = v; }},
    {"dc", "--dc", "Coulomb damping coefficient [N]", [](Resolved& r, double v) { r.spec.dc = v; }},
    {"deadband", "--deadband", "Damper velocity deadband [rad/s]",
     [](Resolved& r, double v) { r.spec.velocity_deadband = v; }},
    {"height", "--height", "Drop height (foot clearance) [m]", [](Resolved& r, double v) { r.drop.h = v; }},
    {"h0", "--h0", "Reference drop height [m]", [](Resolved& r, double v) { r.drop.h0 = v; }},
    {"abs_tol", "--abs-tol", "Solver absolute tolerance", [](Resolved& r, double v) { r.drop.solver.abs_tol = v; }},
    {"rel_tol", "--rel-tol", "Solver relative tolerance", [](Resolved& r, double v) { r.drop.solver.rel_tol = v; }},
    {"max_step", "--max-step", "Solver maximum step [s]", [](Resolved& r, double v) { r.drop.solver.max_step = v; }},
    {"max_sim_time", "--max-sim-time", "Simulation time limit [s]",
     [](Resolved& r, double v) { r.drop.solver.max_sim_time = v; }},
    {"settle_speed_eps", "--settle-speed", "Settled-speed threshold [m/s]",
     [](Resolved& r, double v) { r.drop.solver.settle_speed_eps = v; }},
    {"settle_duration", "--settle-duration", "Time below the settle speed to call a drop settled [s]",
     [](Resolved& r, double v) { r.drop.solver.settle_duration = v; }},
    {"beta_min", "--beta-min", "Bottom-out knee angle [rad]",
     [](Resolved& r, double v) { r.drop.solver.beta_min = v; }},
}};

struct ModelOptions {
  std::string config_path;
  std::array<std::optional<double>, kKeys.size()> values;
};

void add_model_options(CLI::App& app, ModelOptions& opts, bool with_damper, bool with_height) {
  app.add_option("--config", opts.config_path, "JSON file with parameter overrides (flags win)");
  for (std::size_t i = 0; i < kKeys.size(); ++i) {
    const std::string name = kKeys[i].name;
    if (!with_damper && (name == "dv" || name == "dc")) continue;
    if (!with_height && name == "height") continue;
    app.add_option(kKeys[i].flag, opts.values[i], kKeys[i].help);
  }
}

std::optional<std::size_t> key_index(std::string_view name) {
  for (std::size_t i = 0; i < kKeys.size(); ++i) {
    if (name == kKeys[i].name) return i;
  }
  return std::nullopt;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
}

Resolved resolve(const ModelOptions& opts) {
  Resolved r;
  if (!opts.config_path.empty()) {
    const Json cfg = read_json_file(opts.config_path);
    if (!cfg.is_object()) throw ValidationError("config", "top level must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      const auto idx = key_index(key);
      if (!idx) throw ValidationError(key, "unknown configuration key in " + opts.config_path);
      if (!value.is_number()) throw ValidationError(key, "must be a number");
      kKeys[*idx].apply(r, value.get<double>());
    }
  }
  for (std::size_t i = 0; i < kKeys.size(); ++i) {
    if (opts.values[i]) kKeys[i].apply(r, *opts.values[i]);
  }
  r.params.validate();
  r.spec.validate();
  r.drop.validate(r.params);
  return r;
}

Json model_json(const Resolved& r) {
  return Json{{"params", io::to_json(r.params)}, {"damper", io::to_json(r.spec)}, {"drop", io::to_json(r.drop)}};
}

std::vector<std::string> config_comment(const Json& config) { return {"config: " + config.dump()}; }

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ValidationError("out", "cannot create output directory " + dir + ": " + ec.message());
  return p;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path);
  if (!out) throw ValidationError("out", "cannot write " + path.string());
  writer(out);
}

void write_json(const fs::path& path, const Json& j) {
  write_file(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

std::vector<double> parse_range(const std::string& text) {
  std::array<double, 3> parts{};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const auto next = text.find(':', pos);
    if ((i < 2) != (next != std::string::npos)) throw ValidationError("dh-range", "expected lo:hi:count");
    const std::string field = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    try {
      std::size_t used = 0;
      parts[static_cast<std::size_t>(i)] = std::stod(field, &used);
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw ValidationError("dh-range", "malformed number '" + field + "'");
    }
    pos = next + 1;
  }
  const double count = parts[2];
  if (count < 1 || count != std::floor(count)) throw ValidationError("dh-range", "count must be a positive integer");
  if (parts[1] < parts[0]) throw ValidationError("dh-range", "need lo <= hi");
  return linspace(parts[0], parts[1], static_cast<std::size_t>(count));
}

std::pair<double, double> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("window", "expected lo:hi");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ValidationError("window", "malformed number in '" + text + "'");
  }
}

std::pair<std::string, std::string> parse_pair(const std::string& text, const char* field) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
    throw ValidationError(field, "expected two comma-separated paths (force,encoder)");
  }
  return {text.substr(0, comma), text.substr(comma + 1)};
}

std::string mj(double joules) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << joules * 1e3 << " mJ";
  return s.str();
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  ModelOptions model;
  std::string out_dir = ".";
  bool workloop = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const Resolved r = resolve(a.model);
  const DropResult res = simulate_drop(r.params, r.spec, r.drop);
  const fs::path dir = prepare_out_dir(a.out_dir);
  const Json config = Json{{"command", "simulate"}, {"model", model_json(r)}};

  write_file(dir / "trajectory.csv",
             [&](std::ostream& o) { io::write_trajectory_csv(o, res.trajectory, config_comment(config)); });
  Json summary{{"config", config}, {"summary", io::summary_json(res.summary)}, {"events", io::events_json(res.trajectory)}};
  write_json(dir / "summary.json", summary);
  if (a.workloop) {
    const WorkLoop loop = workloop_from_trajectory(res.trajectory);
    write_file(dir / "workloop.csv", [&](std::ostream& o) { io::write_workloop_csv(o, loop, config_comment(config)); });
  }
  out << "h=" << r.drop.h << " m  E_T=" << mj(res.summary.release_energy) << "  E_D="
      << mj(res.summary.dissipated_energy) << "  outcome=" << to_string(res.summary.outcome) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// table2

struct Table2Args {
  ModelOptions model;
  std::string out_dir = ".";
  bool published = false;
  bool calibrate = false;
  std::vector<int> sets{1, 2, 3, 4, 5};
  double dh = 0.025;
  unsigned threads = 0;
  std::string format;
};

int cmd_table2(const Table2Args& a, std::ostream& out) {
  const Resolved r = resolve(a.model);
  Table2Options opts;
  opts.sets = a.sets;
  opts.delta_h = a.dh;
  opts.calibrate = a.calibrate;
  opts.threads = a.threads;
  const SweepResult sweep = run_table2(r.params, r.drop, opts);

  const fs::path dir = prepare_out_dir(a.out_dir);
  Json config{{"command", "table2"},
              {"model", model_json(r)},
              {"coefficients", a.calibrate ? "calibrated" : "published"},
              {"sets", a.sets},
              {"dh", a.dh}};
  if (a.format.empty() || a.format == "csv") {
    write_file(dir / "table2.csv", [&](std::ostream& o) { io::write_sweep_csv(o, sweep, config_comment(config)); });
  }
  if (a.format.empty() || a.format == "json") {
    Json doc = io::sweep_json(sweep);
    doc["config"] = config;
    write_json(dir / "table2.json", doc);
  }

  out << "set  mode     coefficient   step up            reference          step down\n";
  for (std::size_t i = 0; i + 2 < sweep.cells.size(); i += 3) {
    const auto& up = sweep.cells[i];
    const auto& ref = sweep.cells[i + 1];
    const auto& down = sweep.cells[i + 2];
    auto cell = [](const SweepCell& c) {
      std::ostringstream s;
      s << std::fixed << std::setprecision(1) << c.dissipated * 1e3 << " mJ (";
      if (std::isfinite(c.ratio)) {
        s << std::setprecision(0) << c.ratio * 100.0 << "%)";
      } else {
        s << "n/a)";
      }
      return s.str();
    };
    out << std::left << std::setw(5) << up.set << std::setw(9) << to_string(up.mode) << std::setw(14)
        << up.coefficient << std::setw(19) << cell(up) << std::setw(19) << cell(ref) << cell(down) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
  ModelOptions model;
  std::string out_dir = ".";
  std::optional<double> target_mj;
  std::optional<int> level;
  std::string mode = "viscous";
  std::optional<double> lower, upper;
  double tol_mj = 0.5;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  const Resolved r = resolve(a.model);
  if (a.target_mj.has_value() == a.level.has_value()) {
    throw ValidationError("target-mj", "give exactly one of --target-mj or --level");
  }
  double target = 0.0;
  if (a.level) {
    if (*a.level < 1 || *a.level > 5) throw ValidationError("level", "must be 1..5");
    target = target_levels(r.params)[static_cast<std::size_t>(*a.level - 1)];
  } else {
    target = *a.target_mj * 1e-3;
  }
  std::vector<DampingMode> modes;
  if (a.mode == "both") {
    modes = {DampingMode::viscous, DampingMode::coulomb};
  } else {
    modes = {parse_damping_mode(a.mode)};
  }

  Json results = Json::array();
  for (DampingMode mode : modes) {
    DampingTarget t = DampingTarget::with_default_bracket(target, mode);
    if (a.lower) t.lower = *a.lower;
    if (a.upper) t.upper = *a.upper;
    t.tol = a.tol_mj * 1e-3;
    const CalibrationResult res = calibrate(r.params, t, r.drop);
    results.push_back({{"mode", std::string(to_string(mode))},
                       {"coefficient", res.coefficient},
                       {"unit", mode == DampingMode::viscous ? "N s/m" : "N"},
                       {"target_J", target},
                       {"achieved_J", res.achieved_energy},
                       {"iterations", res.iterations},
                       {"bracket", {t.lower, t.upper}}});
    out << to_string(mode) << ": " << (mode == DampingMode::viscous ? "dv = " : "dc = ") << std::setprecision(6)
        << res.coefficient << (mode == DampingMode::viscous ? " N s/m" : " N") << "  (E_D0 = " << mj(res.achieved_energy)
        << ", target " << mj(target) << ")\n";
  }
  const fs::path dir = prepare_out_dir(a.out_dir);
  Json config{{"command", "calibrate"}, {"model", model_json(r)}, {"target_J", target}, {"tol_J", a.tol_mj * 1e-3}};
  write_json(dir / "calibration.json", Json{{"config", config}, {"results", results}});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  ModelOptions model;
  std::string out_dir = ".";
  std::string range = "-0.025:0.025:21";
  std::optional<int> set;
  std::string mode = "viscous";
  unsigned threads = 0;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  Resolved r = resolve(a.model);
  const std::vector<double> dhs = parse_range(a.range);
  if (a.set) {
    if (*a.set < 1 || *a.set > 5) throw ValidationError("set", "must be 1..5");
    const ReferenceSet& ps = kReferenceSets[static_cast<std::size_t>(*a.set - 1)];
    const DampingMode mode = parse_damping_mode(a.mode);
    r.spec = damper_for(mode, mode == DampingMode::viscous ? ps.dv : ps.dc);
  }
  const auto curve = sweep_delta_h(r.params, r.spec, r.drop, dhs, a.threads);

  Json config{{"command", "sweep"}, {"model", model_json(r)}, {"dh_range", a.range}};
  if (a.set) config["set"] = *a.set;
  const fs::path dir = prepare_out_dir(a.out_dir);
  write_file(dir / "sweep.csv", [&](std::ostream& o) { io::write_delta_curve_csv(o, curve, config_comment(config)); });

  Json doc{{"config", config}, {"full_rejection_slope_Jpm", r.params.mass * r.params.g}};
  if (curve.size() >= 2) {
    std::vector<double> xs, ys;
    for (const auto& p : curve) {
      xs.push_back(p.delta_h);
      ys.push_back(p.delta_dissipated);
    }
    const LinearFit fit = fit_line(xs, ys);
    doc["fit"] = {{"slope_Jpm", fit.slope}, {"intercept_J", fit.intercept}, {"r_squared", fit.r_squared}};
    out << curve.size() << " points  slope=" << fit.slope << " J/m  R^2=" << fit.r_squared
        << "  full-rejection slope=" << r.params.mass * r.params.g << " J/m\n";
  }
  write_json(dir / "sweep.json", doc);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string out_dir = ".";
  std::vector<std::string> force, encoder;
  std::string slow;
  std::optional<double> impact_mj;
  std::string spring_free, spring_slow;
  double threshold = 2.0;
  std::size_t encoder_span = 35;
  std::size_t force_span = 5;
  double band = 1.0;
  std::string stance = "contact";
  double l0 = LegParams{}.rest_length();
};

MeasuredDrop analyze_pair(const std::string& force_path, const std::string& encoder_path, const AnalysisOptions& o) {
  return analyze_drop(load_channel(force_path, "F_N"), load_channel(encoder_path, "y_m"), o);
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  if (a.force.size() != a.encoder.size() || a.force.empty()) {
    throw ValidationError("force", "give one --encoder per --force (at least one trial)");
  }
  if (a.slow.empty()) throw ValidationError("slow", "--slow force,encoder is required");
  if (a.impact_mj.has_value() == !a.spring_free.empty()) {
    throw ValidationError("impact-mj", "give either --impact-mj or --spring-free/--spring-slow");
  }
  if (a.spring_free.empty() != a.spring_slow.empty()) {
    throw ValidationError("spring-slow", "--spring-free and --spring-slow go together");
  }
  AnalysisOptions opts;
  opts.threshold = a.threshold;
  opts.encoder_span = a.encoder_span;
  opts.force_span = a.force_span;
  if (a.stance == "contact") opts.rest_length = a.l0;

  std::vector<MeasuredDrop> trials;
  double effective = 0.0;
  for (std::size_t i = 0; i < a.force.size(); ++i) {
    trials.push_back(analyze_pair(a.force[i], a.encoder[i], opts));
    effective += trials.back().energy;
  }
  effective /= static_cast<double>(trials.size());

  // Free-drop reference compression: the deepest compression seen across trials.
  WorkLoop reference = trials.front().loop;
  for (const auto& t : trials) {
    if (t.loop.min_length() < reference.min_length()) reference = t.loop;
  }
  const auto [slow_f, slow_e] = parse_pair(a.slow, "slow");
  const MeasuredDrop slow = analyze_pair(slow_f, slow_e, opts);
  const WorkLoop slow_cut = truncate_to_max_compression(slow.loop, reference);
  const double cfriction = loop_area(slow_cut);

  double impact = 0.0;
  Json impact_json;
  if (a.impact_mj) {
    impact = *a.impact_mj * 1e-3;
    impact_json = {{"source", "given"}};
  } else {
    const auto [sf_f, sf_e] = parse_pair(a.spring_free, "spring-free");
    const auto [ss_f, ss_e] = parse_pair(a.spring_slow, "spring-slow");
    const MeasuredDrop spring_free = analyze_pair(sf_f, sf_e, opts);
    const MeasuredDrop spring_slow = analyze_pair(ss_f, ss_e, opts);
    const double slow_area = loop_area(truncate_to_max_compression(spring_slow.loop, spring_free.loop));
    impact = spring_free.energy - slow_area;
    impact_json = {{"source", "spring-only drops"}, {"free_J", spring_free.energy}, {"slow_J", slow_area}};
  }
  const EnergyBreakdown breakdown = decompose_energy(effective, cfriction, impact);

  Json config{{"command", "analyze"},
              {"force", a.force},
              {"encoder", a.encoder},
              {"slow", a.slow},
              {"threshold_N", a.threshold},
              {"encoder_span", a.encoder_span},
              {"force_span", a.force_span},
              {"band_multiplier", a.band},
              {"stance", a.stance}};
  if (a.stance == "contact") config["l0_m"] = a.l0;
  if (a.impact_mj) config["impact_mj"] = *a.impact_mj;
  if (!a.spring_free.empty()) {
    config["spring_free"] = a.spring_free;
    config["spring_slow"] = a.spring_slow;
  }
  const fs::path dir = prepare_out_dir(a.out_dir);
  Json trial_areas = Json::array();
  for (const auto& t : trials) trial_areas.push_back(t.energy);
  Json doc{{"config", config},
           {"breakdown", io::breakdown_json(breakdown)},
           {"consistent", breakdown.consistent()},
           {"trial_effective_J", trial_areas},
           {"impact", impact_json}};
  write_json(dir / "breakdown.json", doc);
  const auto comments = config_comment(config);
  write_file(dir / "workloop.csv", [&](std::ostream& o) { io::write_workloop_csv(o, trials.front().loop, comments); });
  write_file(dir / "slow_workloop.csv", [&](std::ostream& o) { io::write_workloop_csv(o, slow_cut, comments); });
  if (trials.size() >= 2) {
    std::vector<TimeSeries> forces, heights;
    for (const auto& t : trials) {
      forces.push_back(t.aligned.force);
      heights.push_back(t.aligned.encoder);
    }
    write_file(dir / "force_envelope.csv",
               [&](std::ostream& o) { io::write_envelope_csv(o, trial_envelope(forces, a.band), comments); });
    write_file(dir / "encoder_envelope.csv",
               [&](std::ostream& o) { io::write_envelope_csv(o, trial_envelope(heights, a.band), comments); });
  }
  if (!breakdown.consistent()) {
    out << "warning: negative viscous remainder; the loss components are inconsistent\n";
  }
  out << "E_effective=" << mj(breakdown.effective) << "  E_cfriction=" << mj(breakdown.cfriction)
      << "  E_impact=" << mj(breakdown.impact) << "  E_viscous=" << mj(breakdown.viscous) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// characterize

struct CharacterizeArgs {
  std::string out_dir = ".";
  std::vector<std::string> force, velocity, position;
  std::string window;
  std::size_t force_span = 1;
  std::size_t velocity_span = 1;
  double band = 1.0;
};

int cmd_characterize(const CharacterizeArgs& a, std::ostream& out) {
  if (a.force.empty()) throw ValidationError("force", "at least one --force is required");
  if (a.velocity.empty() == a.position.empty()) {
    throw ValidationError("velocity", "give either --velocity or --position files");
  }
  const auto& kin = a.velocity.empty() ? a.position : a.velocity;
  if (kin.size() != a.force.size()) throw ValidationError("force", "one velocity/position file per --force");
  const auto [lo, hi] = parse_window(a.window);

  Json fits = Json::array();
  std::vector<TimeSeries> forces;
  double rate_sum = 0.0;
  for (std::size_t i = 0; i < a.force.size(); ++i) {
    TimeSeries force = load_channel(a.force[i], "F_N");
    if (a.force_span > 1) force = moving_average(force, a.force_span);
    TimeSeries vel = a.velocity.empty() ? differentiate(load_channel(kin[i], "y_m"), "v_mps")
                                        : load_channel(kin[i], "v_mps");
    if (a.velocity_span > 1) vel = moving_average(vel, a.velocity_span);
    const DamperFit fit = fit_settling_slope(force, vel, lo, hi);
    fits.push_back(io::damper_fit_json(fit));
    rate_sum += fit.damping_rate;
    forces.push_back(std::move(force));
  }
  const double mean_rate = rate_sum / static_cast<double>(a.force.size());

  Json config{{"command", "characterize"},
              {"force", a.force},
              {"window", a.window},
              {"force_span", a.force_span},
              {"velocity_span", a.velocity_span},
              {"band_multiplier", a.band}};
  if (!a.velocity.empty()) config["velocity"] = a.velocity;
  if (!a.position.empty()) config["position"] = a.position;
  const fs::path dir = prepare_out_dir(a.out_dir);
  Json doc{{"config", config}, {"fits", fits}, {"mean_damping_rate_Nspm", mean_rate}};
  write_json(dir / "damper_fit.json", doc);
  if (forces.size() >= 2) {
    write_file(dir / "force_envelope.csv", [&](std::ostream& o) {
      io::write_envelope_csv(o, trial_envelope(forces, a.band), config_comment(config));
    });
  }
  out << "damping rate = " << std::setprecision(6) << mean_rate << " N s/m over " << a.force.size() << " trial(s)\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Drop simulation and damping analysis for a two-segment spring-damper leg", "legdamp"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate one drop; writes trajectory.csv and summary.json");
  add_model_options(*simulate, sim.model, true, true);
  simulate->add_option("--out", sim.out_dir, "Output directory");
  simulate->add_flag("--workloop", sim.workloop, "Also write workloop.csv");

  Table2Args t2;
  auto* table2 = app.add_subcommand("table2", "Sets x {viscous, coulomb} x {step up, reference, step down}");
  add_model_options(*table2, t2.model, false, false);
  table2->add_option("--out", t2.out_dir, "Output directory");
  auto* published_flag = table2->add_flag("--paper-coefficients", t2.published, "Use the published coefficients (default)");
  table2->add_flag("--calibrate", t2.calibrate, "Recalibrate coefficients to the target levels")->excludes(published_flag);
  table2->add_option("--sets", t2.sets, "Set indices (1..5)")->delimiter(',');
  table2->add_option("--dh", t2.dh, "Height perturbation [m]");
  table2->add_option("--threads", t2.threads, "Worker threads (0: all cores)");
  table2->add_option("--format", t2.format, "Write only csv or json")->check(CLI::IsMember({"csv", "json"}));

  CalibrateArgs cal;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Find the damping coefficient for a target E_D0");
  add_model_options(*calibrate_cmd, cal.model, false, false);
  calibrate_cmd->add_option("--out", cal.out_dir, "Output directory");
  calibrate_cmd->add_option("--target-mj", cal.target_mj, "Target dissipation at h0 [mJ]");
  calibrate_cmd->add_option("--level", cal.level, "Target level 1..5 (m g 0.1 l0 ... m g 0.5 l0)");
  calibrate_cmd->add_option("--mode", cal.mode, "viscous, coulomb or both")
      ->check(CLI::IsMember({"viscous", "coulomb", "both"}));
  calibrate_cmd->add_option("--lower", cal.lower, "Bracket lower coefficient");
  calibrate_cmd->add_option("--upper", cal.upper, "Bracket upper coefficient");
  calibrate_cmd->add_option("--tol-mj", cal.tol_mj, "Energy tolerance [mJ]");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "dE_D over a range of height perturbations");
  add_model_options(*sweep, sw.model, true, false);
  sweep->add_option("--out", sw.out_dir, "Output directory");
  sweep->add_option("--dh-range", sw.range, "lo:hi:count in metres");
  sweep->add_option("--set", sw.set, "Use the published coefficient of this set (with --mode)");
  sweep->add_option("--mode", sw.mode, "viscous or coulomb (with --set)")
      ->check(CLI::IsMember({"viscous", "coulomb"}));
  sweep->add_option("--threads", sw.threads, "Worker threads (0: all cores)");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Work-loop energy breakdown from drop-bench recordings");
  analyze->add_option("--out", an.out_dir, "Output directory");
  analyze->add_option("--force", an.force, "Free-drop force CSV (t_s,F_N); repeat per trial")->required();
  analyze->add_option("--encoder", an.encoder, "Free-drop encoder CSV (t_s,y_m); repeat per trial")->required();
  analyze->add_option("--slow", an.slow, "Slow-drop force,encoder CSV pair");
  analyze->add_option("--impact-mj", an.impact_mj, "Impact loss [mJ]");
  analyze->add_option("--spring-free", an.spring_free, "Spring-only free drop force,encoder pair");
  analyze->add_option("--spring-slow", an.spring_slow, "Spring-only slow drop force,encoder pair");
  analyze->add_option("--threshold", an.threshold, "Touch-down force threshold [N]");
  analyze->add_option("--encoder-span", an.encoder_span, "Encoder moving-average span [samples]");
  analyze->add_option("--force-span", an.force_span, "Force moving-average span [samples]");
  analyze->add_option("--band", an.band, "Envelope half-width in standard deviations");
  analyze->add_option("--stance", an.stance, "Loop window: encoder contact with l0, or force above threshold")
      ->check(CLI::IsMember({"contact", "force"}));
  analyze->add_option("--l0", an.l0, "Leg rest length for the contact window [m]")->check(CLI::PositiveNumber);

  CharacterizeArgs ch;
  auto* characterize = app.add_subcommand("characterize", "Least-squares damping rate of an isolated damper drop");
  characterize->add_option("--out", ch.out_dir, "Output directory");
  characterize->add_option("--force", ch.force, "Force CSV (t_s,F_N); repeat per trial")->required();
  characterize->add_option("--velocity", ch.velocity, "Velocity CSV (t_s,v_mps); repeat per trial");
  characterize->add_option("--position", ch.position, "Position CSV (t_s,y_m), differentiated; repeat per trial");
  characterize->add_option("--window", ch.window, "Settling speed window lo:hi [m/s]")->required();
  characterize->add_option("--force-span", ch.force_span, "Force moving-average span [samples]");
  characterize->add_option("--velocity-span", ch.velocity_span, "Velocity moving-average span [samples]");
  characterize->add_option("--band", ch.band, "Envelope half-width in standard deviations");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (table2->parsed()) return cmd_table2(t2, out);
    if (calibrate_cmd->parsed()) return cmd_calibrate(cal, out);
    if (sweep->parsed()) return cmd_sweep(sw, out);
    if (analyze->parsed()) return cmd_analyze(an, out);
    if (characterize->parsed()) return cmd_characterize(ch, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const AnalysisError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const IntegrationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const CalibrationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SingularityError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInput;
}

}  // namespace legdamp::cli
