#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "legdamp/drop_simulator.hpp"
#include "legdamp/energy.hpp"
#include "legdamp/errors.hpp"
#include "legdamp/exp_data.hpp"

using namespace legdamp;

namespace {

const LegParams kLeg{};

TimeSeries uniform(std::string name, double rate, std::size_t n, auto&& fn) {
  std::vector<double> t(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) / rate;
    v[i] = fn(t[i]);
  }
  return make_series(std::move(name), std::move(t), std::move(v));
}

TimeSeries parse(const std::string& text, std::string_view channel = {}) {
  std::istringstream in(text);
  return read_channel(in, "fixture.csv", channel);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

WorkLoop rectangle(double l_lo, double l_hi, double f) {
  WorkLoop w;
  w.points = {{l_lo, 0.0}, {l_hi, 0.0}, {l_hi, f}, {l_lo, f}};
  return w;
}

}  // namespace

TEST(ReadChannel, WellFormedFixture) {
  const TimeSeries s = parse("# bench 2\nt_s,F_N\n0.000,0.1\n0.001,2.5\n0.002,7.25\n", "F_N");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.name, "F_N");
  EXPECT_DOUBLE_EQ(s.v[2], 7.25);
  EXPECT_NEAR(s.nominal_rate, 1000.0, 1e-6);
}

TEST(ReadChannel, RejectsDuplicateTimestampWithLine) {
  EXPECT_EQ(parse_error_line("t_s,F_N\n0.0,1\n0.001,2\n0.001,3\n"), 4u);
}

TEST(ReadChannel, MalformedRowsAndEmptyFiles) {
  EXPECT_EQ(parse_error_line("t_s,y_m\n0.0,0.2\n0.1,abc\n"), 3u);
  EXPECT_EQ(parse_error_line("t_s,y_m\n0.0,0.2,7\n"), 2u);
  EXPECT_EQ(parse_error_line("t_s,y_m\n0.0,0,2\n"), 2u);
  EXPECT_EQ(parse_error_line(""), 0u);
  EXPECT_EQ(parse_error_line("t_s,y_m\n"), 0u);
  EXPECT_EQ(parse_error_line("time,y_m\n0,1\n"), 1u);
  EXPECT_THROW(parse("t_s,y_m\n0,1\n", "F_N"), ParseError);
}

TEST(ReadChannel, WriteReadRoundTripIsLossless) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  const TimeSeries s = uniform("y_m", 8000, 500, [&](double t) { return 0.2 + 0.01 * std::sin(40 * t) + 1e-7 * n(rng); });
  std::stringstream buf;
  write_channel(buf, s, {"synthetic"});
  const TimeSeries back = read_channel(buf, "buffer", "y_m");
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back.t[i], s.t[i]);
    EXPECT_EQ(back.v[i], s.v[i]);
  }
}

TEST(ReadChannel, SimulatedExportRoundTripOnDisk) {
  DropConfig cfg;
  const DropResult res = simulate_drop(kLeg, DamperSpec::viscous(68.0), cfg);
  const SensorChannels ch = sensor_channels_from(res.trajectory, kLeg);
  const auto dir = std::filesystem::temp_directory_path() / "legdamp_exp_data_test";
  std::filesystem::create_directories(dir);
  save_channel(dir / "force.csv", ch.force);
  save_channel(dir / "encoder.csv", ch.encoder);
  const TimeSeries f = load_channel(dir / "force.csv", "F_N");
  const TimeSeries e = load_channel(dir / "encoder.csv", "y_m");
  EXPECT_EQ(f.v, ch.force.v);
  EXPECT_EQ(e.t, ch.encoder.t);
  EXPECT_EQ(e.v, ch.encoder.v);
  EXPECT_THROW(load_channel(dir / "missing.csv"), ParseError);
  std::filesystem::remove_all(dir);
}

TEST(MovingAverage, ConstantUnchanged) {
  const TimeSeries c = uniform("x", 1000, 100, [](double) { return 3.25; });
  const TimeSeries m = moving_average(c, 35);
  ASSERT_EQ(m.size(), c.size());
  for (double v : m.v) EXPECT_NEAR(v, 3.25, 1e-12);
}

TEST(MovingAverage, ImpulseResponsePlateau) {
  TimeSeries s = uniform("x", 1000, 201, [](double) { return 0.0; });
  s.v[100] = 1.0;
  const TimeSeries m = moving_average(s, 35);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const bool inside = i >= 83 && i <= 117;
    EXPECT_NEAR(m.v[i], inside ? 1.0 / 35 : 0.0, 1e-15) << i;
  }
}

TEST(MovingAverage, WhiteNoiseVarianceShrinksBySpan) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n(0.0, 1.0);
  const TimeSeries s = uniform("x", 8000, 100000, [&](double) { return n(rng); });
  const TimeSeries m = moving_average(s, 35);
  auto variance = [](const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    double mean = 0, sq = 0;
    for (std::size_t i = lo; i < hi; ++i) mean += v[i];
    mean /= static_cast<double>(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) sq += (v[i] - mean) * (v[i] - mean);
    return sq / static_cast<double>(hi - lo);
  };
  const double in = variance(s.v, 17, s.size() - 17);
  const double out = variance(m.v, 17, m.size() - 17);
  EXPECT_NEAR(out, in / 35.0, 0.1 * in / 35.0);
}

TEST(MovingAverage, Linear) {
  const TimeSeries a = uniform("a", 1000, 300, [](double t) { return std::sin(30 * t); });
  const TimeSeries b = uniform("b", 1000, 300, [](double t) { return t * t; });
  TimeSeries combo = a;
  for (std::size_t i = 0; i < combo.size(); ++i) combo.v[i] = 2.5 * a.v[i] - 0.75 * b.v[i];
  const TimeSeries ma = moving_average(a, 21), mb = moving_average(b, 21), mc = moving_average(combo, 21);
  for (std::size_t i = 0; i < mc.size(); ++i) EXPECT_NEAR(mc.v[i], 2.5 * ma.v[i] - 0.75 * mb.v[i], 1e-12);
}

TEST(MovingAverage, SpanValidation) {
  const TimeSeries s = uniform("x", 1000, 20, [](double t) { return t; });
  EXPECT_THROW(moving_average(s, 4), ValidationError);
  EXPECT_THROW(moving_average(s, 0), ValidationError);
  EXPECT_THROW(moving_average(s, 21), ValidationError);
  EXPECT_EQ(moving_average(s, 1).v, s.v);
}

TEST(AlignTrial, RecoversInjectedOffset) {
  // Touch-down 3.7 ms after the first force sample of the drop window.
  const double td = 0.1 + 3.7e-3;
  auto force_fn = [&](double t) { return t < td ? 0.0 : 4000.0 * (t - td); };
  const TimeSeries force = uniform("F_N", 1000, 300, force_fn);
  const TimeSeries encoder = uniform("y_m", 8000, 2400, [&](double t) { return 0.3 - 0.5 * (t - td); });
  const AlignedTrial a = align_trial(force, encoder, 2.0);
  EXPECT_NEAR(a.touchdown_time, td, 1e-3);
  EXPECT_NEAR(a.encoder.at(0.0), 0.3, 0.5 * 1e-3);
  ASSERT_EQ(a.force.size(), a.encoder.size());
  EXPECT_EQ(a.force.t, a.encoder.t);
}

TEST(AlignTrial, AlreadyAlignedPairHasNoShift) {
  const TimeSeries force = uniform("F_N", 1000, 100, [](double t) { return 2.0 + 1000 * t; });
  TimeSeries shifted = force;
  for (double& t : shifted.t) t -= 0.05;
  for (double& v : shifted.v) v -= 50.0;  // crosses 2 N exactly at t = 0
  EXPECT_NEAR(find_touchdown(shifted, 2.0), 0.0, 1e-12);
}

TEST(AlignTrial, ThresholdAboveMaximumFails) {
  const TimeSeries force = uniform("F_N", 1000, 100, [](double t) { return 10 * std::sin(30 * t); });
  const TimeSeries encoder = uniform("y_m", 8000, 800, [](double t) { return t; });
  EXPECT_THROW(align_trial(force, encoder, 20.0), AnalysisError);
}

TEST(Envelope, IdenticalTrialsHaveZeroBand) {
  const TimeSeries a = uniform("x", 1000, 50, [](double t) { return std::cos(10 * t); });
  const Envelope e = trial_envelope({a, a, a});
  ASSERT_EQ(e.t.size(), a.size());
  for (std::size_t i = 0; i < e.t.size(); ++i) {
    EXPECT_DOUBLE_EQ(e.mean[i], a.v[i]);
    EXPECT_NEAR(e.half_width[i], 0.0, 1e-15);
  }
}

TEST(Envelope, PopulationStandardDeviation) {
  const TimeSeries zero = uniform("x", 1000, 10, [](double) { return 0.0; });
  const TimeSeries two = uniform("x", 1000, 10, [](double) { return 2.0; });
  const Envelope e = trial_envelope({zero, two});
  EXPECT_DOUBLE_EQ(e.mean[3], 1.0);
  EXPECT_DOUBLE_EQ(e.half_width[3], 1.0);
  EXPECT_DOUBLE_EQ(e.lo(3), 0.0);
  EXPECT_DOUBLE_EQ(e.hi(3), 2.0);
  const Envelope narrow = trial_envelope({zero, two}, 0.95);
  EXPECT_DOUBLE_EQ(narrow.half_width[3], 0.95);
}

TEST(Envelope, MonteCarloMeanConvergesToCleanCurve) {
  const double sigma = 0.5;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, sigma);
  auto clean = [](double t) { return 20.0 * std::sin(std::numbers::pi * t / 0.1); };
  std::vector<TimeSeries> trials;
  for (int k = 0; k < 10; ++k) trials.push_back(uniform("F_N", 1000, 100, [&](double t) { return clean(t) + n(rng); }));
  const Envelope e = trial_envelope(trials);
  double sq = 0.0, band = 0.0;
  for (std::size_t i = 0; i < e.t.size(); ++i) {
    const double err = e.mean[i] - clean(e.t[i]);
    sq += err * err;
    band += e.half_width[i];
    EXPECT_LT(std::abs(err), 4.5 * sigma / std::sqrt(10.0));
  }
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(e.t.size())), sigma / std::sqrt(10.0), 0.25 * sigma / std::sqrt(10.0));
  EXPECT_NEAR(band / static_cast<double>(e.t.size()), sigma, 0.15 * sigma);
}

TEST(Envelope, NeedsTwoTrials) {
  const TimeSeries a = uniform("x", 1000, 10, [](double) { return 1.0; });
  EXPECT_THROW(trial_envelope({a}), AnalysisError);
}

TEST(MeasuredWorkloop, ZeroForceRecordHasNoStance) {
  AlignedTrial a;
  a.force = uniform("F_N", 8000, 200, [](double) { return 0.0; });
  a.encoder = uniform("y_m", 8000, 200, [](double) { return 0.246; });
  EXPECT_THROW(measured_workloop(a), AnalysisError);
}

TEST(MeasuredWorkloop, MissingLiftOffIsAnError) {
  AlignedTrial a;
  a.force = uniform("F_N", 8000, 200, [](double t) { return 5.0 + 100 * t; });
  a.encoder = uniform("y_m", 8000, 200, [](double t) { return 0.246 - t; });
  EXPECT_THROW(measured_workloop(a), AnalysisError);
}

TEST(MeasuredWorkloop, SpringOnlyImpactLossFromConstructedLoops) {
  // Free and slow spring-only loops built to enclose 91 mJ and 60 mJ.
  const WorkLoop free_loop = rectangle(0.2, 0.246, 0.091 / 0.046);
  const WorkLoop slow = rectangle(0.2, 0.246, 0.060 / 0.046);
  const double impact = loop_area(free_loop) - loop_area(truncate_to_max_compression(slow, free_loop));
  EXPECT_NEAR(impact, 0.031, 1e-12);
  const EnergyBreakdown b = decompose_energy(loop_area(free_loop), loop_area(slow), impact);
  EXPECT_NEAR(b.viscous, 0.0, 1e-15);
}

TEST(FitSettlingSlope, RecoversKnownViscousRate) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  // Speed rises to 1 m/s at 20 ms, then decays.
  auto speed = [](double t) { return t < 0.02 ? t / 0.02 : std::exp(-(t - 0.02) / 0.03); };
  const TimeSeries vel = uniform("v_mps", 8000, 1600, speed);
  const TimeSeries force = uniform("F_N", 1000, 200, [&](double t) { return 120.0 * speed(t) + n(rng); });
  const DamperFit fit = fit_settling_slope(force, vel, 0.1, 0.9);
  EXPECT_NEAR(fit.damping_rate, 120.0, 3.0);
  EXPECT_NEAR(fit.intercept, 0.0, 2.0);
  EXPECT_GE(fit.points, 10u);
  EXPECT_GT(fit.dissipated_work, 0.0);
}

TEST(FitSettlingSlope, ConstantForceIsPureCoulomb) {
  auto speed = [](double t) { return t < 0.02 ? t / 0.02 : std::exp(-(t - 0.02) / 0.03); };
  const TimeSeries vel = uniform("v_mps", 8000, 1600, speed);
  const TimeSeries force = uniform("F_N", 1000, 200, [](double) { return 14.0; });
  const DamperFit fit = fit_settling_slope(force, vel, 0.1, 0.9);
  EXPECT_NEAR(fit.damping_rate, 0.0, 1e-9);
  EXPECT_NEAR(fit.intercept, 14.0, 1e-9);
}

TEST(FitSettlingSlope, AdjustableRangeEndpoints) {
  auto speed = [](double t) { return t < 0.02 ? t / 0.02 : std::exp(-(t - 0.02) / 0.03); };
  const TimeSeries vel = uniform("v_mps", 8000, 1600, speed);
  for (double rate : {91.0, 192.0}) {
    const TimeSeries force = uniform("F_N", 1000, 200, [&](double t) { return 4.0 + rate * speed(t); });
    const DamperFit fit = fit_settling_slope(force, vel, 0.1, 0.9);
    EXPECT_GE(fit.damping_rate, 91.0 - 1e-6);
    EXPECT_LE(fit.damping_rate, 192.0 + 1e-6);
  }
}

TEST(FitSettlingSlope, TooFewPointsInWindow) {
  auto speed = [](double t) { return t < 0.02 ? t / 0.02 : std::exp(-(t - 0.02) / 0.03); };
  const TimeSeries vel = uniform("v_mps", 8000, 1600, speed);
  const TimeSeries force = uniform("F_N", 1000, 200, [&](double t) { return 100 * speed(t); });
  EXPECT_THROW(fit_settling_slope(force, vel, 0.95, 0.99), AnalysisError);
}

TEST(Impulse, ConstantForceRamp) {
  const TimeSeries f = uniform("F_N", 1000, 101, [](double) { return 10.0; });
  const TimeSeries j = impulse(f);
  EXPECT_NEAR(j.v.back(), 1.0, 1e-12);
  EXPECT_NEAR(j.v[50], 0.5, 1e-12);
  const TimeSeries z = impulse(uniform("F_N", 1000, 20, [](double) { return 0.0; }));
  for (double v : z.v) EXPECT_EQ(v, 0.0);
}

TEST(Impulse, MomentumTheoremOnSimulatedStance) {
  DropConfig cfg;
  const DropResult res = simulate_drop(kLeg, DamperSpec::viscous(119.4), cfg);
  std::vector<double> t, v;
  for (const auto& s : res.trajectory.stance()) {
    t.push_back(s.t);
    v.push_back(s.leg_force);
  }
  const TimeSeries j = impulse(make_series("F_N", t, v));
  const auto& sum = res.summary;
  const double expected =
      kLeg.mass * (*sum.liftoff_speed + sum.touchdown_speed) + kLeg.mass * kLeg.g * sum.stance_duration;
  EXPECT_NEAR(j.v.back(), expected, 0.01 * expected);
}

TEST(Differentiate, RecoversSlope) {
  const TimeSeries s = uniform("y_m", 8000, 100, [](double t) { return 0.3 - 1.5 * t; });
  const TimeSeries d = differentiate(s, "v_mps");
  for (double v : d.v) EXPECT_NEAR(v, -1.5, 1e-9);
}

TEST(Pipeline, SimulationInTheLoopRecoversDissipation) {
  for (const DamperSpec& spec : {DamperSpec::viscous(119.4), DamperSpec::coulomb(29.3), DamperSpec::viscous(29.5)}) {
    DropConfig cfg;
    const DropResult res = simulate_drop(kLeg, spec, cfg);
    const SensorChannels ch = sensor_channels_from(res.trajectory, kLeg);
    AnalysisOptions opts;
    opts.rest_length = kLeg.rest_length();
    const MeasuredDrop m = analyze_drop(ch.force, ch.encoder, opts);
    EXPECT_NEAR(m.energy, res.summary.dissipated_energy, 0.02 * res.summary.dissipated_energy)
        << "dv=" << spec.dv << " dc=" << spec.dc;
  }
}

TEST(Pipeline, ContactWindowNeedsContact) {
  const DropResult res = simulate_drop(kLeg, DamperSpec::viscous(68), DropConfig{});
  const SensorChannels ch = sensor_channels_from(res.trajectory, kLeg);
  AnalysisOptions opts;
  opts.rest_length = 0.1;  // far below any recorded height
  EXPECT_THROW(analyze_drop(ch.force, ch.encoder, opts), AnalysisError);
}

TEST(Pipeline, ContactWindowEndsAtRestLength) {
  const DropResult res = simulate_drop(kLeg, DamperSpec::coulomb(17.3), DropConfig{});
  const SensorChannels ch = sensor_channels_from(res.trajectory, kLeg);
  AnalysisOptions opts;
  opts.rest_length = kLeg.rest_length();
  const WorkLoop loop = analyze_drop(ch.force, ch.encoder, opts).loop;
  EXPECT_EQ(loop.points.front().length, kLeg.rest_length());
  EXPECT_EQ(loop.points.back().length, kLeg.rest_length());
  for (const auto& p : loop.points) {
    EXPECT_LE(p.length, kLeg.rest_length());
    EXPECT_GE(p.force, 0.0);
  }
}
