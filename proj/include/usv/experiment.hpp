#pragma once

// Scenario configuration, batch runner, metrics and CSV/JSON persistence.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "usv/control.hpp"
#include "usv/disturbances.hpp"
#include "usv/guidance.hpp"
#include "usv/vessel.hpp"

namespace usv::experiment {

enum class Condition { Calm, CurrentOnly, WavesOnly, Both };

inline constexpr Condition kAllConditions[] = {Condition::Calm, Condition::CurrentOnly,
                                               Condition::WavesOnly, Condition::Both};

std::string to_string(Condition c);
Condition condition_from_string(const std::string& text);
bool has_current(Condition c);
bool has_waves(Condition c);

struct ScenarioConfig {
  std::string name = "scenario";
  Condition condition = Condition::Calm;

  // Disturbance magnitudes applied when the condition enables them.
  double current_speed_mps = 0.5;
  double current_dir_deg = 0.0;  // coming from
  int sea_state = 4;
  double wave_dir_deg = 0.0;     // coming from
  int wave_components = 50;
  double wind_speed_mps = 0.0;
  double wind_dir_deg = 0.0;     // coming from
  env::WaveForceGains wave_gains;
  env::WindCoefficients wind_coefficients;

  std::filesystem::path waypoint_file;
  std::vector<guidance::Vec2> waypoints;

  int repetitions = 5;
  std::uint64_t seed = 1;
  double timeout_s = 1200.0;
  double sim_dt = 0.01;
  int control_decimation = 5;  // control period = sim_dt * control_decimation

  sim::VesselParams vessel = sim::VesselParams::defaults();
  guidance::GuidanceParams guidance;
  control::ControllerConfig control = control::ControllerConfig::defaults(vessel);

  double effective_current_speed() const { return has_current(condition) ? current_speed_mps : 0.0; }
  int effective_sea_state() const { return has_waves(condition) ? sea_state : 0; }
  control::ControllerMode controller() const { return control.mode; }

  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

/// Parses the key-value scenario format. Relative waypoint paths resolve
/// against `base_dir`.
ScenarioConfig parse_scenario(const std::string& text,
                              const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& file);

struct LogRow {
  double t = 0.0;
  sim::VesselState state;
  guidance::GuidanceOutput guidance;
  control::ControlTelemetry control;
  double charge_ah = 0.0;
};

struct RunLog {
  int repetition = 0;
  std::uint64_t seed = 0;
  bool completed = false;
  std::string failure;  // empty when completed
  double duration_s = 0.0;
  double charge_ah = 0.0;
  std::vector<LogRow> rows;  // one per control tick
};

/// Simulates one repetition (wave seed = cfg.seed + repetition).
RunLog simulate(const ScenarioConfig& cfg, int repetition);

/// sqrt(mean(y_err^2)) over the uniformly sampled rows. Throws on empty logs.
double rms_xte(const RunLog& log);
double max_xte(const RunLog& log);

struct Stat {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct RunMetrics {
  int repetition = 0;
  std::uint64_t seed = 0;
  bool completed = false;
  std::string failure;
  double rms_xte = 0.0;
  double max_xte = 0.0;
  double charge_ah = 0.0;
  double duration_s = 0.0;
};

struct MetricsSummary {
  std::string name;
  std::string controller;
  std::string condition;
  std::uint64_t seed = 0;
  int repetitions = 0;
  int completed = 0;
  std::vector<RunMetrics> runs;  // sorted by repetition
  // Aggregates over completed runs only; empty when none completed.
  std::optional<Stat> rms_xte;
  std::optional<Stat> max_xte;
  std::optional<Stat> charge_ah;
  std::optional<Stat> duration_s;

  bool all_completed() const { return completed == repetitions; }
};

RunMetrics run_metrics(const RunLog& log);
MetricsSummary summarize(const ScenarioConfig& cfg, std::vector<RunMetrics> runs);

struct ScenarioResult {
  std::vector<RunLog> logs;  // empty unless keep_logs
  MetricsSummary summary;
};

struct RunOptions {
  bool keep_logs = true;
  unsigned threads = 0;  // 0 = hardware concurrency
};

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

struct ComparisonRow {
  std::string condition;
  MetricsSummary a;
  MetricsSummary b;
  double xte_reduction_pct = 0.0;  // 100 * (1 - mean_a / mean_b)
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
};

/// Runs both configurations under every condition in `conditions`.
ComparisonReport compare(const ScenarioConfig& a, const ScenarioConfig& b,
                         const std::vector<Condition>& conditions = {std::begin(kAllConditions),
                                                                     std::end(kAllConditions)},
                         const RunOptions& options = {false, 0});

/// The 2 controllers x 4 conditions matrix: ADRC rows first.
std::vector<ScenarioConfig> paper_replica_matrix(const ScenarioConfig& adrc_base,
                                                 const ScenarioConfig& pid_base);

// Persistence.
std::vector<std::string> csv_columns();
/// One row of csv_columns() values; flags are 0/1.
std::vector<double> csv_row(const LogRow& row);
void write_csv(std::ostream& out, const RunLog& log);
/// Reads back the column named `column` from a CSV produced by write_csv.
std::vector<double> read_csv_column(std::istream& in, const std::string& column);

nlohmann::json to_json(const MetricsSummary& s);
MetricsSummary summary_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ComparisonReport& r);
ComparisonReport report_from_json(const nlohmann::json& j);

/// Text table of a comparison report.
std::string format_report(const ComparisonReport& r);

/// Writes <out_dir>/rep<i>.csv and <out_dir>/summary.json.
void write_outputs(const std::filesystem::path& out_dir, const ScenarioResult& result);

}  // namespace usv::experiment
