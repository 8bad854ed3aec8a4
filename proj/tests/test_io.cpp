#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "legdamp/calibration.hpp"
#include "legdamp/drop_simulator.hpp"
#include "legdamp/energy.hpp"
#include "legdamp/errors.hpp"
#include "legdamp/io.hpp"

using namespace legdamp;

namespace {

std::string first_data_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') return line;
  }
  return {};
}

}  // namespace

TEST(TrajectoryCsv, HeaderAndPhaseLabels) {
  const DropResult res = simulate_drop(LegParams{}, DamperSpec::viscous(68), DropConfig{});
  std::ostringstream out;
  io::write_trajectory_csv(out, res.trajectory, {"run 1"});
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("# run 1\n", 0), 0u);
  EXPECT_EQ(first_data_line(text), "t,y,ydot,beta,betadot,F_leg,tau_d,phase");
  EXPECT_NE(text.find(",flight\n"), std::string::npos);
  EXPECT_NE(text.find(",stance-flexion\n"), std::string::npos);
  EXPECT_NE(text.find(",stance-extension\n"), std::string::npos);
}

TEST(EventsOutput, CsvAndJsonAgree) {
  const DropResult res = simulate_drop(LegParams{}, DamperSpec::viscous(68), DropConfig{});
  std::ostringstream out;
  io::write_events_csv(out, res.trajectory);
  EXPECT_EQ(first_data_line(out.str()), "event,t_s");
  const io::Json j = io::events_json(res.trajectory);
  ASSERT_EQ(j.size(), res.trajectory.events.size());
  EXPECT_EQ(j[0]["event"], "touch-down");
  EXPECT_EQ(j.back()["event"], "lift-off");
}

TEST(SummaryJson, FieldsAndAbsentLiftOff) {
  const DropResult lifted = simulate_drop(LegParams{}, DamperSpec::viscous(68), DropConfig{});
  const io::Json a = io::summary_json(lifted.summary);
  for (const char* key : {"h_m", "v_td_mps", "E_T_J", "E_D_J", "v_lo_mps", "max_compression_m", "stance_duration_s",
                          "outcome"}) {
    EXPECT_TRUE(a.contains(key)) << key;
  }
  EXPECT_EQ(a["outcome"], "lifted-off");
  DropConfig still;
  still.h = 0.0;
  const io::Json b = io::summary_json(simulate_drop(LegParams{}, DamperSpec::none(), still).summary);
  EXPECT_TRUE(b["v_lo_mps"].is_null());
  EXPECT_EQ(b["outcome"], "settled");
}

TEST(WorkLoopCsv, RoundTrip) {
  WorkLoop loop;
  loop.points = {{0.246, 2.0}, {0.2301234567891234, 45.5}, {0.21, 60.125}, {0.24, 1.0 / 3.0}};
  std::stringstream buf;
  io::write_workloop_csv(buf, loop, {"fixture"});
  const WorkLoop back = io::read_workloop_csv(buf, "buffer");
  ASSERT_EQ(back.size(), loop.size());
  for (std::size_t i = 0; i < loop.size(); ++i) {
    EXPECT_EQ(back.points[i].length, loop.points[i].length);
    EXPECT_EQ(back.points[i].force, loop.points[i].force);
  }
}

TEST(WorkLoopCsv, BadHeaderReportsLine) {
  std::istringstream in("# c\nlength,force\n0.2,1\n");
  try {
    io::read_workloop_csv(in, "x.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(BreakdownJson, FourNamedFields) {
  const io::Json j = io::breakdown_json(decompose_energy(0.15, 0.06, 0.031));
  EXPECT_DOUBLE_EQ(j["effective_J"].get<double>(), 0.15);
  EXPECT_DOUBLE_EQ(j["cfriction_J"].get<double>(), 0.06);
  EXPECT_DOUBLE_EQ(j["impact_J"].get<double>(), 0.031);
  EXPECT_NEAR(j["viscous_J"].get<double>(), 0.059, 1e-12);
}

TEST(SweepOutput, CsvRowPerCellAndNestedJson) {
  Table2Options opts;
  opts.sets = {2};
  const SweepResult t = run_table2(LegParams{}, DropConfig{}, opts);
  std::ostringstream out;
  io::write_sweep_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
  const io::Json j = io::sweep_json(t);
  EXPECT_EQ(j["sets"]["2"]["viscous"]["cells"].size(), 3u);
  EXPECT_DOUBLE_EQ(j["sets"]["2"]["coulomb"]["coefficient"].get<double>(), 17.3);
}

TEST(ConfigJson, KeysMatchOverrideNames) {
  const io::Json p = io::to_json(LegParams{});
  const io::Json d = io::to_json(DamperSpec::viscous(3));
  const io::Json c = io::to_json(DropConfig{});
  for (const char* k : {"mass", "lambda1", "lambda2", "k", "r_k", "r_d", "beta0", "g"}) EXPECT_TRUE(p.contains(k));
  for (const char* k : {"dv", "dc", "deadband"}) EXPECT_TRUE(d.contains(k));
  for (const char* k : {"height", "h0", "abs_tol", "rel_tol", "max_step", "max_sim_time", "settle_speed_eps",
                        "settle_duration", "beta_min"}) {
    EXPECT_TRUE(c.contains(k));
  }
}
