#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "usv/errors.hpp"
#include "usv/experiment.hpp"

using namespace usv::experiment;
using doctest::Approx;

namespace {

const std::filesystem::path kSource = USV_SOURCE_DIR;

std::string scenario_text(const std::string& controller, const std::string& condition,
                          const std::string& waypoints, int reps, const std::string& extra = "") {
  const bool current = condition == "CurrentOnly" || condition == "Both";
  const bool waves = condition == "WavesOnly" || condition == "Both";
  std::ostringstream s;
  s << "[scenario]\nname = t\ncontroller = " << controller << "\ncondition = " << condition
    << "\nwaypoints = " << (kSource / "data" / waypoints).string() << "\nrepetitions = " << reps
    << "\nseed = 3\n[environment]\ncurrent_speed_mps = " << (current ? 0.5 : 0.0)
    << "\nsea_state = " << (waves ? 4 : 0) << "\n"
    << extra;
  return s.str();
}

RunLog synthetic_log(const std::vector<double>& y_err) {
  RunLog log;
  for (std::size_t i = 0; i < y_err.size(); ++i) {
    LogRow row;
    row.t = 0.05 * static_cast<double>(i);
    row.guidance.y_err = y_err[i];
    log.rows.push_back(row);
  }
  return log;
}

}  // namespace

TEST_CASE("rms of constant and sinusoidal cross-track errors") {
  CHECK(rms_xte(synthetic_log(std::vector<double>(100, 1.0))) == Approx(1.0));
  CHECK(rms_xte(synthetic_log(std::vector<double>(100, -2.0))) == Approx(2.0));
  // Whole periods of sin(t), sampled uniformly.
  std::vector<double> wave;
  const int n = 4000;
  for (int i = 0; i < n; ++i) wave.push_back(std::sin(4.0 * std::numbers::pi * i / n));
  CHECK(rms_xte(synthetic_log(wave)) == Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(max_xte(synthetic_log({0.2, -0.7, 0.5})) == Approx(0.7));
  CHECK_THROWS(rms_xte(RunLog{}));
}

TEST_CASE("calm ADRC run on a straight line tracks within 0.1 m") {
  const ScenarioConfig cfg = parse_scenario(scenario_text("ADRC", "Calm", "straight.wpt", 1));
  const RunLog log = simulate(cfg, 0);
  REQUIRE(log.completed);
  CHECK(rms_xte(log) < 0.1);
  // Once settled, the offset stays small.
  double tail = 0.0;
  for (const auto& row : log.rows) {
    if (row.t > 20.0) tail = std::max(tail, std::abs(row.guidance.y_err));
  }
  CHECK(tail < 0.05);
}

TEST_CASE("calm repetitions are bit-identical") {
  const ScenarioConfig cfg = parse_scenario(scenario_text("PID", "Calm", "straight.wpt", 5));
  const ScenarioResult r = run_scenario(cfg, {true, 0});
  REQUIRE(r.logs.size() == 5);
  for (const auto& log : r.logs) {
    REQUIRE(log.rows.size() == r.logs[0].rows.size());
    for (std::size_t i = 0; i < log.rows.size(); ++i) {
      REQUIRE(log.rows[i].state.x == r.logs[0].rows[i].state.x);
      REQUIRE(log.rows[i].state.y == r.logs[0].rows[i].state.y);
      REQUIRE(log.rows[i].charge_ah == r.logs[0].rows[i].charge_ah);
    }
  }
  CHECK(r.summary.rms_xte->min == r.summary.rms_xte->max);
}

TEST_CASE("different wave seeds give different runs") {
  ScenarioConfig cfg = parse_scenario(scenario_text("ADRC", "WavesOnly", "straight.wpt", 1));
  const RunLog a = simulate(cfg, 0);
  cfg.seed += 17;
  const RunLog b = simulate(cfg, 0);
  CHECK(a.completed);
  CHECK(b.completed);
  CHECK(a.seed != b.seed);
  bool differ = false;
  for (std::size_t i = 0; i < std::min(a.rows.size(), b.rows.size()) && !differ; ++i) {
    differ = a.rows[i].state.y != b.rows[i].state.y;
  }
  CHECK(differ);
}

TEST_CASE("log rows are uniformly spaced") {
  const ScenarioConfig cfg = parse_scenario(scenario_text("PID", "Calm", "straight.wpt", 1));
  const RunLog log = simulate(cfg, 0);
  REQUIRE(log.rows.size() > 10);
  const double h = cfg.sim_dt * cfg.control_decimation;
  for (std::size_t i = 1; i < log.rows.size(); ++i) {
    CHECK(log.rows[i].t > log.rows[i - 1].t);
    CHECK(log.rows[i].t - log.rows[i - 1].t == Approx(h).epsilon(1e-9));
  }
}

TEST_CASE("a run that cannot finish is reported, not averaged") {
  ScenarioConfig cfg = parse_scenario(scenario_text("PID", "Calm", "straight.wpt", 2));
  cfg.timeout_s = 5.0;
  const ScenarioResult r = run_scenario(cfg, {false, 1});
  CHECK(r.summary.completed == 0);
  CHECK_FALSE(r.summary.rms_xte.has_value());
  REQUIRE(r.summary.runs.size() == 2);
  CHECK_FALSE(r.summary.runs[0].failure.empty());
}

TEST_CASE("CSV round-trip reproduces the summary") {
  const ScenarioConfig cfg = parse_scenario(scenario_text("ADRC", "WavesOnly", "straight.wpt", 2));
  const ScenarioResult r = run_scenario(cfg, {true, 0});
  const auto dir = std::filesystem::temp_directory_path() / "usv_csv_roundtrip";
  std::filesystem::remove_all(dir);
  write_outputs(dir, r);
  std::vector<double> rms;
  for (int rep = 0; rep < 2; ++rep) {
    std::ifstream in(dir / ("rep" + std::to_string(rep) + ".csv"));
    REQUIRE(in);
    const std::vector<double> y = read_csv_column(in, "y_err");
    REQUIRE_FALSE(y.empty());
    double s = 0.0;
    for (double v : y) s += v * v;
    rms.push_back(std::sqrt(s / static_cast<double>(y.size())));
    CHECK(std::abs(rms.back() - r.summary.runs[rep].rms_xte) < 1e-9);
  }
  std::ifstream js(dir / "summary.json");
  const MetricsSummary back = summary_from_json(nlohmann::json::parse(js));
  CHECK(std::abs(back.rms_xte->mean - 0.5 * (rms[0] + rms[1])) < 1e-9);
  std::filesystem::remove_all(dir);
}

TEST_CASE("CSV columns are stable and match row width") {
  const auto cols = csv_columns();
  REQUIRE(cols.size() > 20);
  CHECK(cols.front() == "t");
  CHECK(cols.back() == "Ah");
  for (const char* name : {"x", "y", "psi", "u", "v", "r", "s", "y_err", "psi_sp", "u_sp",
                           "heading_z1", "lateral_z3", "F_x", "F_y", "M_z", "F_SL", "F_SR", "F_B",
                           "sat_B"}) {
    CHECK(std::find(cols.begin(), cols.end(), name) != cols.end());
  }
  CHECK(csv_row(LogRow{}).size() == cols.size());
}

TEST_CASE("both controllers log the same schema") {
  for (const char* ctrl : {"ADRC", "PID"}) {
    const ScenarioConfig cfg = parse_scenario(scenario_text(ctrl, "Calm", "straight.wpt", 1));
    const RunLog log = simulate(cfg, 0);
    std::ostringstream out;
    write_csv(out, log);
    const std::string header = out.str().substr(0, out.str().find('\n'));
    std::string expected;
    for (const auto& c : csv_columns()) expected += (expected.empty() ? "" : ",") + c;
    CHECK(header == expected);
  }
}

TEST_CASE("summary JSON round-trips") {
  MetricsSummary s;
  s.name = "x";
  s.controller = "ADRC";
  s.condition = "Both";
  s.seed = 9;
  s.repetitions = 2;
  s.completed = 1;
  s.runs = {{0, 9, true, "", 0.5, 1.2, 0.9, 160.0}, {1, 10, false, "timeout", 0.0, 0.0, 0.0, 0.0}};
  s.rms_xte = Stat{0.5, 0.5, 0.5};
  s.max_xte = Stat{1.2, 1.2, 1.2};
  s.charge_ah = Stat{0.9, 0.9, 0.9};
  s.duration_s = Stat{160.0, 160.0, 160.0};
  const nlohmann::json j = to_json(s);
  CHECK(to_json(summary_from_json(j)) == j);
  CHECK(to_json(summary_from_json(nlohmann::json::parse(j.dump()))).dump() == j.dump());
}

TEST_CASE("comparing a configuration with itself shows no reduction") {
  ScenarioConfig cfg = parse_scenario(scenario_text("PID", "Calm", "straight.wpt", 1));
  const ComparisonReport r = compare(cfg, cfg, {Condition::Calm, Condition::CurrentOnly});
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) CHECK(row.xte_reduction_pct == 0.0);
  const nlohmann::json j = to_json(r);
  CHECK(to_json(report_from_json(j)) == j);
  CHECK(format_report(r).find("CurrentOnly") != std::string::npos);
}

TEST_CASE("the bundled replica preset covers both controllers under all four conditions") {
  const ScenarioConfig a = load_scenario(kSource / "configs" / "paper_replica_adrc.ini");
  const ScenarioConfig b = load_scenario(kSource / "configs" / "paper_replica_pid.ini");
  CHECK(a.controller() == usv::control::ControllerMode::Adrc);
  CHECK(b.controller() == usv::control::ControllerMode::Pid);
  CHECK(a.repetitions == 5);
  const auto matrix = paper_replica_matrix(a, b);
  REQUIRE(matrix.size() == 8);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& cfg : matrix) {
    seen.insert({usv::control::to_string(cfg.controller()), to_string(cfg.condition)});
    CHECK_NOTHROW(cfg.validate());
  }
  CHECK(seen.size() == 8);
}

TEST_CASE("scenario parsing errors") {
  const auto rejects = [](const std::string& text) {
    CHECK_THROWS_AS(parse_scenario(text), usv::ConfigError);
  };
  const std::string ok = scenario_text("ADRC", "Calm", "straight.wpt", 1);
  CHECK_NOTHROW(parse_scenario(ok));
  rejects(ok + "[bogus]\nx = 1\n");
  rejects(ok + "[guidance]\nwhat = 1\n");
  rejects(ok + "[guidance]\nmission_speed = fast\n");
  rejects(scenario_text("LQR", "Calm", "straight.wpt", 1));
  rejects(scenario_text("ADRC", "Stormy", "straight.wpt", 1));
  rejects(scenario_text("ADRC", "Calm", "missing.wpt", 1));
  rejects(scenario_text("ADRC", "Calm", "straight.wpt", 0));
  // Condition consistency.
  rejects("[scenario]\ncontroller = ADRC\ncondition = CurrentOnly\nwaypoints = " +
          (kSource / "data" / "straight.wpt").string() + "\n[environment]\nsea_state = 3\n");
  rejects("[scenario]\ncontroller = ADRC\ncondition = WavesOnly\nwaypoints = " +
          (kSource / "data" / "straight.wpt").string() + "\n[environment]\ncurrent_speed_mps = 0.5\n");
  rejects("[scenario]\ncontroller = ADRC\ncondition = Calm\n");
}

TEST_CASE("vessel overrides flow into controller defaults") {
  const ScenarioConfig cfg = parse_scenario(
      scenario_text("ADRC", "Calm", "straight.wpt", 1, "[vessel]\nbow_max = 80\n"));
  CHECK(cfg.vessel.bow_max == 80.0);
  CHECK(cfg.control.adrc_lateral.u_max == Approx(1.5 * 80.0));
}
