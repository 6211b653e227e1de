#include "usv/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "usv/angles.hpp"
#include "usv/errors.hpp"

namespace usv::experiment {

std::string to_string(Condition c) {
  switch (c) {
    case Condition::Calm: return "Calm";
    case Condition::CurrentOnly: return "CurrentOnly";
    case Condition::WavesOnly: return "WavesOnly";
    case Condition::Both: return "Both";
  }
  return "?";
}

Condition condition_from_string(const std::string& text) {
  for (Condition c : kAllConditions) {
    if (to_string(c) == text) return c;
  }
  throw ConfigError("unknown condition '" + text + "' (expected Calm, CurrentOnly, WavesOnly or Both)");
}

bool has_current(Condition c) { return c == Condition::CurrentOnly || c == Condition::Both; }
bool has_waves(Condition c) { return c == Condition::WavesOnly || c == Condition::Both; }

void ScenarioConfig::validate() const {
  if (name.empty() || name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("scenario name must be non-empty and contain no path separators");
  }
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (!(timeout_s > 0.0)) throw ConfigError("timeout_s must be > 0");
  if (!(sim_dt > 0.0)) throw ConfigError("sim_dt must be > 0");
  if (control_decimation < 1) throw ConfigError("control_decimation must be >= 1");
  if (std::abs(sim_dt * control_decimation - control.h) > 1e-12) {
    throw ConfigError("controller sample time must equal sim_dt * control_decimation");
  }
  if (!(current_speed_mps >= 0.0)) throw ConfigError("current_speed_mps must be >= 0");
  if (!(wind_speed_mps >= 0.0)) throw ConfigError("wind_speed_mps must be >= 0");
  env::significant_wave_height(sea_state);
  if (wave_components < 1) throw ConfigError("wave_components must be >= 1");
  if (has_current(condition) && !(current_speed_mps > 0.0)) {
    throw ConfigError("condition " + to_string(condition) + " requires a current > 0");
  }
  if (has_waves(condition) && sea_state == 0) {
    throw ConfigError("condition " + to_string(condition) + " requires sea_state > 0");
  }
  vessel.validate();
  guidance.validate();
  control.validate();
  guidance::build_path(waypoints, guidance.effective_turn_radius());
}

RunLog simulate(const ScenarioConfig& cfg, int repetition) {
  RunLog log;
  log.repetition = repetition;
  log.seed = cfg.seed + static_cast<std::uint64_t>(repetition);

  const double radius = cfg.guidance.effective_turn_radius();
  guidance::Guidance guide(guidance::build_path(cfg.waypoints, radius), cfg.guidance);
  const auto& path = guide.path();

  sim::VesselState initial;
  initial.x = path.start().x();
  initial.y = path.start().y();
  initial.psi = path.heading_at(0.0);
  sim::Simulator sim(cfg.vessel, initial);
  control::TrajectoryController controller(cfg.control, cfg.vessel);

  env::WaveField waves;
  const int sea_state = cfg.effective_sea_state();
  if (sea_state > 0) {
    waves = env::sample_pm_spectrum(sea_state, cfg.wave_components, log.seed, cfg.wave_dir_deg);
  }
  sim::EnvForces forces;
  forces.current = env::current_velocity(cfg.effective_current_speed(), cfg.current_dir_deg);

  const auto max_steps = static_cast<std::int64_t>(std::ceil(cfg.timeout_s / cfg.sim_dt));
  log.rows.reserve(static_cast<std::size_t>(max_steps / cfg.control_decimation + 1));
  sim::ThrustCommand command;
  try {
    for (std::int64_t k = 0; k <= max_steps; ++k) {
      const double t = static_cast<double>(k) * cfg.sim_dt;
      const sim::VesselState& s = sim.state();
      if (k % cfg.control_decimation == 0) {
        const guidance::GuidanceOutput g = guide.update({s.x, s.y});
        if (g.complete) {
          log.completed = true;
          log.duration_s = t;
          break;
        }
        command = controller.step(g, s);
        log.rows.push_back({t, s, g, controller.telemetry(), sim.charge_used_ah()});
      }
      if (k == max_steps) break;
      forces.wave = waves.components.empty() ? Eigen::Vector3d::Zero()
                                             : env::wave_force(waves, t, s.psi, cfg.wave_gains);
      forces.wind = cfg.wind_speed_mps > 0.0
                        ? env::wind_force(cfg.wind_speed_mps, cfg.wind_dir_deg, s.psi,
                                          cfg.wind_coefficients)
                        : Eigen::Vector3d::Zero();
      sim.step(command, forces, cfg.sim_dt);
    }
    if (!log.completed) {
      log.failure = "timeout after " + std::to_string(cfg.timeout_s) + " s";
      log.duration_s = cfg.timeout_s;
    }
  } catch (const NumericalError& e) {
    log.completed = false;
    log.failure = e.what();
    log.duration_s = sim.time();
  }
  log.charge_ah = sim.charge_used_ah();
  return log;
}

double rms_xte(const RunLog& log) {
  if (log.rows.empty()) throw std::invalid_argument("rms_xte: empty run log");
  double sum = 0.0;
  for (const auto& row : log.rows) sum += row.guidance.y_err * row.guidance.y_err;
  return std::sqrt(sum / static_cast<double>(log.rows.size()));
}

double max_xte(const RunLog& log) {
  if (log.rows.empty()) throw std::invalid_argument("max_xte: empty run log");
  double m = 0.0;
  for (const auto& row : log.rows) m = std::max(m, std::abs(row.guidance.y_err));
  return m;
}

RunMetrics run_metrics(const RunLog& log) {
  RunMetrics m;
  m.repetition = log.repetition;
  m.seed = log.seed;
  m.completed = log.completed;
  m.failure = log.failure;
  m.charge_ah = log.charge_ah;
  m.duration_s = log.duration_s;
  if (!log.rows.empty()) {
    m.rms_xte = rms_xte(log);
    m.max_xte = max_xte(log);
  }
  return m;
}

MetricsSummary summarize(const ScenarioConfig& cfg, std::vector<RunMetrics> runs) {
  std::sort(runs.begin(), runs.end(),
            [](const RunMetrics& a, const RunMetrics& b) { return a.repetition < b.repetition; });
  MetricsSummary s;
  s.name = cfg.name;
  s.controller = control::to_string(cfg.controller());
  s.condition = to_string(cfg.condition);
  s.seed = cfg.seed;
  s.repetitions = static_cast<int>(runs.size());

  auto aggregate = [&](double RunMetrics::*field) -> std::optional<Stat> {
    std::optional<Stat> st;
    double sum = 0.0;
    int n = 0;
    for (const auto& r : runs) {
      if (!r.completed) continue;
      const double v = r.*field;
      if (!st) st = Stat{0.0, v, v};
      st->min = std::min(st->min, v);
      st->max = std::max(st->max, v);
      sum += v;
      ++n;
    }
    if (st) st->mean = sum / n;
    return st;
  };
  s.completed = static_cast<int>(
      std::count_if(runs.begin(), runs.end(), [](const RunMetrics& r) { return r.completed; }));
  s.rms_xte = aggregate(&RunMetrics::rms_xte);
  s.max_xte = aggregate(&RunMetrics::max_xte);
  s.charge_ah = aggregate(&RunMetrics::charge_ah);
  s.duration_s = aggregate(&RunMetrics::duration_s);
  s.runs = std::move(runs);
  return s;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned threads = std::max(1u, options.threads == 0 ? hw : options.threads);

  std::vector<RunLog> logs(static_cast<std::size_t>(cfg.repetitions));
  if (threads == 1) {
    for (int rep = 0; rep < cfg.repetitions; ++rep) logs[rep] = simulate(cfg, rep);
  } else {
    for (int first = 0; first < cfg.repetitions; first += static_cast<int>(threads)) {
      std::vector<std::future<RunLog>> batch;
      const int last = std::min(cfg.repetitions, first + static_cast<int>(threads));
      for (int rep = first; rep < last; ++rep) {
        batch.push_back(std::async(std::launch::async, [&cfg, rep] { return simulate(cfg, rep); }));
      }
      for (int rep = first; rep < last; ++rep) logs[rep] = batch[rep - first].get();
    }
  }

  std::vector<RunMetrics> metrics;
  metrics.reserve(logs.size());
  for (const auto& log : logs) metrics.push_back(run_metrics(log));

  ScenarioResult result;
  result.summary = summarize(cfg, std::move(metrics));
  if (options.keep_logs) result.logs = std::move(logs);
  return result;
}

ComparisonReport compare(const ScenarioConfig& a, const ScenarioConfig& b,
                         const std::vector<Condition>& conditions, const RunOptions& options) {
  ComparisonReport report;
  for (Condition c : conditions) {
    ScenarioConfig ca = a;
    ScenarioConfig cb = b;
    ca.condition = cb.condition = c;
    ComparisonRow row;
    row.condition = to_string(c);
    row.a = run_scenario(ca, options).summary;
    row.b = run_scenario(cb, options).summary;
    if (row.a.rms_xte && row.b.rms_xte && row.b.rms_xte->mean > 0.0) {
      row.xte_reduction_pct = 100.0 * (1.0 - row.a.rms_xte->mean / row.b.rms_xte->mean);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<ScenarioConfig> paper_replica_matrix(const ScenarioConfig& adrc_base,
                                                 const ScenarioConfig& pid_base) {
  std::vector<ScenarioConfig> out;
  for (const auto* base : {&adrc_base, &pid_base}) {
    const auto mode =
        base == &adrc_base ? control::ControllerMode::Adrc : control::ControllerMode::Pid;
    for (Condition c : kAllConditions) {
      ScenarioConfig cfg = *base;
      cfg.control.mode = mode;
      cfg.condition = c;
      cfg.name = base->name + "_" + to_string(c);
      out.push_back(std::move(cfg));
    }
  }
  return out;
}

}  // namespace usv::experiment
