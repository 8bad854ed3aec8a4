#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli.hpp"
#include "legdamp/calibration.hpp"
#include "legdamp/drop_simulator.hpp"
#include "legdamp/energy.hpp"
#include "legdamp/errors.hpp"
#include "legdamp/exp_data.hpp"
#include "legdamp/leg_model.hpp"

namespace py = pybind11;
using namespace legdamp;

namespace {

template <class F>
py::array_t<double> column(const SimTrajectory& traj, F get) {
  py::array_t<double> out(static_cast<py::ssize_t>(traj.samples.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < traj.samples.size(); ++i) view(static_cast<py::ssize_t>(i)) = get(traj.samples[i]);
  return out;
}

py::dict trajectory_dict(const SimTrajectory& traj) {
  py::dict d;
  d["t"] = column(traj, [](const TrajectorySample& s) { return s.t; });
  d["y"] = column(traj, [](const TrajectorySample& s) { return s.y; });
  d["ydot"] = column(traj, [](const TrajectorySample& s) { return s.ydot; });
  d["beta"] = column(traj, [](const TrajectorySample& s) { return s.beta; });
  d["betadot"] = column(traj, [](const TrajectorySample& s) { return s.betadot; });
  d["F_leg"] = column(traj, [](const TrajectorySample& s) { return s.leg_force; });
  d["tau_d"] = column(traj, [](const TrajectorySample& s) { return s.damper_torque; });
  d["dissipated"] = column(traj, [](const TrajectorySample& s) { return s.dissipated; });
  py::list phases;
  for (const auto& s : traj.samples) phases.append(std::string(to_string(s.phase)));
  d["phase"] = phases;
  py::list events;
  for (const auto& e : traj.events) events.append(py::make_tuple(std::string(to_string(e.kind)), e.t));
  d["events"] = events;
  return d;
}

py::array_t<double> loop_array(const WorkLoop& loop) {
  py::array_t<double> out({static_cast<py::ssize_t>(loop.size()), py::ssize_t{2}});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < loop.size(); ++i) {
    view(static_cast<py::ssize_t>(i), 0) = loop.points[i].length;
    view(static_cast<py::ssize_t>(i), 1) = loop.points[i].force;
  }
  return out;
}

WorkLoop loop_from(const std::vector<std::pair<double, double>>& pts) {
  WorkLoop loop;
  for (const auto& [l, f] : pts) loop.points.push_back({l, f});
  return loop;
}

DropConfig make_config(double h, double h0) {
  DropConfig cfg;
  cfg.h = h;
  cfg.h0 = h0;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_legdamp, m) {
  m.doc() = "Knee-damped leg drop simulation and work-loop analysis";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SingularityError>(m, "SingularityError", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
  py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);
  py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_RuntimeError);

  py::class_<LegParams>(m, "LegParams")
      .def(py::init<>())
      .def_readwrite("mass", &LegParams::mass)
      .def_readwrite("lambda1", &LegParams::lambda1)
      .def_readwrite("lambda2", &LegParams::lambda2)
      .def_readwrite("k", &LegParams::k)
      .def_readwrite("r_k", &LegParams::r_k)
      .def_readwrite("r_d", &LegParams::r_d)
      .def_readwrite("beta0", &LegParams::beta0)
      .def_readwrite("g", &LegParams::g)
      .def("rest_length", &LegParams::rest_length);

  py::class_<DamperSpec>(m, "DamperSpec")
      .def(py::init([](double dv, double dc) { return DamperSpec{dv, dc}; }), py::arg("dv") = 0.0,
           py::arg("dc") = 0.0)
      .def_readwrite("dv", &DamperSpec::dv)
      .def_readwrite("dc", &DamperSpec::dc)
      .def_readwrite("velocity_deadband", &DamperSpec::velocity_deadband)
      .def_static("viscous", &DamperSpec::viscous)
      .def_static("coulomb", &DamperSpec::coulomb)
      .def_static("none", &DamperSpec::none);

  m.def("leg_length", &leg_length, py::arg("beta"), py::arg("params") = LegParams{});
  m.def("beta_from_length", &beta_from_length, py::arg("y"), py::arg("params") = LegParams{});
  m.def("knee_torque", &knee_torque, py::arg("beta"), py::arg("betadot"), py::arg("spec"),
        py::arg("params") = LegParams{});

  py::class_<DropSummary>(m, "DropSummary")
      .def_readonly("h", &DropSummary::h)
      .def_readonly("touchdown_speed", &DropSummary::touchdown_speed)
      .def_readonly("release_energy", &DropSummary::release_energy)
      .def_readonly("dissipated_energy", &DropSummary::dissipated_energy)
      .def_readonly("liftoff_speed", &DropSummary::liftoff_speed)
      .def_readonly("max_compression", &DropSummary::max_compression)
      .def_readonly("stance_duration", &DropSummary::stance_duration)
      .def_property_readonly("outcome", [](const DropSummary& s) { return std::string(to_string(s.outcome)); });

  m.def(
      "simulate_drop",
      [](const DamperSpec& spec, double h, const LegParams& params, double h0, bool trajectory) {
        const DropResult res = simulate_drop(params, spec, make_config(h, h0));
        if (!trajectory) return py::tuple(py::make_tuple(res.summary));
        return py::tuple(py::make_tuple(res.summary, trajectory_dict(res.trajectory)));
      },
      py::arg("spec"), py::arg("h") = 0.14, py::arg("params") = LegParams{}, py::arg("h0") = 0.14,
      py::arg("trajectory") = true, "Returns (summary, trajectory dict), or (summary,) with trajectory=False.");

  m.def(
      "calibrate",
      [](double target_J, const std::string& mode, const LegParams& params, double h0, double tol) {
        DampingTarget t = DampingTarget::with_default_bracket(target_J, parse_damping_mode(mode));
        t.tol = tol;
        const CalibrationResult r = calibrate(params, t, make_config(h0, h0));
        return py::make_tuple(r.coefficient, r.achieved_energy, r.iterations);
      },
      py::arg("target_J"), py::arg("mode") = "viscous", py::arg("params") = LegParams{}, py::arg("h0") = 0.14,
      py::arg("tol") = 5e-4, "Returns (coefficient, achieved_J, iterations).");

  m.def("target_levels", &target_levels, py::arg("params") = LegParams{});

  m.def(
      "table2",
      [](bool calibrated, std::vector<int> sets, double delta_h, unsigned threads) {
        Table2Options opts;
        opts.calibrate = calibrated;
        opts.sets = std::move(sets);
        opts.delta_h = delta_h;
        opts.threads = threads;
        const SweepResult r = run_table2(LegParams{}, DropConfig{}, opts);
        py::list rows;
        for (const auto& c : r.cells) {
          py::dict row;
          row["set"] = c.set;
          row["mode"] = std::string(to_string(c.mode));
          row["coefficient"] = c.coefficient;
          row["h"] = c.h;
          row["delta_h"] = c.delta_h;
          row["E_D"] = c.dissipated;
          row["delta_E_D"] = c.delta_dissipated;
          row["ratio"] = c.ratio;
          rows.append(row);
        }
        return rows;
      },
      py::arg("calibrated") = false, py::arg("sets") = std::vector<int>{1, 2, 3, 4, 5}, py::arg("delta_h") = 0.025,
      py::arg("threads") = 0u);

  m.def(
      "sweep_delta_h",
      [](const DamperSpec& spec, const std::vector<double>& delta_hs, unsigned threads) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& p : sweep_delta_h(LegParams{}, spec, DropConfig{}, delta_hs, threads)) {
          out.emplace_back(p.delta_h, p.delta_dissipated, p.full_rejection);
        }
        return out;
      },
      py::arg("spec"), py::arg("delta_hs"), py::arg("threads") = 0u,
      "Returns [(delta_h, delta_E_D, full_rejection)].");

  m.def(
      "loop_area", [](const std::vector<std::pair<double, double>>& pts) { return loop_area(loop_from(pts)); },
      py::arg("points"), "Signed shoelace area of [(length, force)] points; counter-clockwise is positive.");

  py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
      .def_readonly("effective", &EnergyBreakdown::effective)
      .def_readonly("cfriction", &EnergyBreakdown::cfriction)
      .def_readonly("impact", &EnergyBreakdown::impact)
      .def_readonly("viscous", &EnergyBreakdown::viscous)
      .def("consistent", &EnergyBreakdown::consistent)
      .def("total", &EnergyBreakdown::total);
  m.def("decompose_energy", &decompose_energy, py::arg("effective"), py::arg("cfriction"), py::arg("impact"));

  m.def(
      "sensor_channels",
      [](const DamperSpec& spec, double h, double encoder_hz, double force_hz) {
        const LegParams params;
        const DropResult res = simulate_drop(params, spec, make_config(h, 0.14));
        const SensorChannels ch = sensor_channels_from(res.trajectory, params, SensorRates{encoder_hz, force_hz});
        return py::make_tuple(py::make_tuple(ch.force.t, ch.force.v), py::make_tuple(ch.encoder.t, ch.encoder.v));
      },
      py::arg("spec"), py::arg("h") = 0.14, py::arg("encoder_hz") = 8000.0, py::arg("force_hz") = 1000.0,
      "Simulated bench recording: ((t_force, F), (t_encoder, y)).");

  m.def(
      "analyze_drop",
      [](std::vector<double> tf, std::vector<double> f, std::vector<double> te, std::vector<double> y,
         std::optional<double> rest_length, std::size_t force_span, std::size_t encoder_span, double threshold) {
        AnalysisOptions opts;
        opts.rest_length = rest_length;
        opts.force_span = force_span;
        opts.encoder_span = encoder_span;
        opts.threshold = threshold;
        const MeasuredDrop d = analyze_drop(make_series("F_N", std::move(tf), std::move(f)),
                                            make_series("y_m", std::move(te), std::move(y)), opts);
        return py::make_tuple(d.energy, loop_array(d.loop));
      },
      py::arg("t_force"), py::arg("force"), py::arg("t_encoder"), py::arg("y"),
      py::arg("rest_length") = std::optional<double>(LegParams{}.rest_length()), py::arg("force_span") = 5,
      py::arg("encoder_span") = 35, py::arg("threshold") = 2.0,
      "Measured work loop of one drop: (energy_J, loop as an (n, 2) array of length, force).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process: (exit_code, stdout, stderr).");

}
