#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "usv/errors.hpp"
#include "usv/experiment.hpp"

namespace usv::experiment {
namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

nlohmann::json stat_json(const std::optional<Stat>& s) {
  if (!s) return nullptr;
  return {{"mean", s->mean}, {"min", s->min}, {"max", s->max}};
}

std::optional<Stat> stat_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return Stat{j.at("mean").get<double>(), j.at("min").get<double>(), j.at("max").get<double>()};
}

std::string fmt_stat(const std::optional<Stat>& s, int precision) {
  if (!s) return "n/a";
  return fmt::format("{:.{}f} [{:.{}f}, {:.{}f}]", s->mean, precision, s->min, precision, s->max,
                     precision);
}

}  // namespace

std::vector<std::string> csv_columns() {
  return {"t",          "x",          "y",          "psi",        "u",          "v",
          "r",          "s",          "y_err",      "psi_sp",     "u_sp",       "heading_z1",
          "heading_z2", "heading_z3", "surge_z1",   "surge_z2",   "surge_z3",   "lateral_z1",
          "lateral_z2", "lateral_z3", "F_x",        "F_y",        "M_z",        "F_SL",
          "F_SR",       "F_B",        "sat_heading", "sat_surge", "sat_lateral", "sat_SL",
          "sat_SR",     "sat_B",      "Ah"};
}

std::vector<double> csv_row(const LogRow& row) {
  const auto& s = row.state;
  const auto& g = row.guidance;
  const auto& c = row.control;
  auto flag = [](bool b) { return b ? 1.0 : 0.0; };
  return {row.t,
          s.x, s.y, s.psi, s.u, s.v, s.r,
          g.s, g.y_err, g.psi_sp, g.u_sp,
          c.heading.z1, c.heading.z2, c.heading.z3,
          c.surge.z1, c.surge.z2, c.surge.z3,
          c.lateral.z1, c.lateral.z2, c.lateral.z3,
          c.demand.surge_force, c.demand.sway_force, c.demand.yaw_moment,
          c.compensated.stern_left, c.compensated.stern_right, c.compensated.bow,
          flag(c.heading.saturated), flag(c.surge.saturated), flag(c.lateral.saturated),
          flag(c.thruster_saturated[0]), flag(c.thruster_saturated[1]), flag(c.thruster_saturated[2]),
          row.charge_ah};
}

void write_csv(std::ostream& out, const RunLog& log) {
  const auto cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& row : log.rows) {
    const auto values = csv_row(row);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out << ',';
      put(out, values[i]);
    }
    out << '\n';
  }
}

std::vector<double> read_csv_column(std::istream& in, const std::string& column) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("CSV: missing header");
  std::size_t index = 0;
  bool found = false;
  {
    std::istringstream header(line);
    std::string name;
    for (std::size_t i = 0; std::getline(header, name, ','); ++i) {
      if (name == column) {
        index = i;
        found = true;
        break;
      }
    }
  }
  if (!found) throw ConfigError("CSV: no column '" + column + "'");
  std::vector<double> values;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string cell;
    for (std::size_t i = 0; i <= index; ++i) std::getline(fields, cell, ',');
    double v = 0.0;
    std::from_chars(cell.data(), cell.data() + cell.size(), v);
    values.push_back(v);
  }
  return values;
}

nlohmann::json to_json(const MetricsSummary& s) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : s.runs) {
    runs.push_back({{"repetition", r.repetition},
                    {"seed", r.seed},
                    {"completed", r.completed},
                    {"failure", r.failure},
                    {"rms_xte_m", r.rms_xte},
                    {"max_xte_m", r.max_xte},
                    {"charge_ah", r.charge_ah},
                    {"duration_s", r.duration_s}});
  }
  return {{"name", s.name},
          {"controller", s.controller},
          {"condition", s.condition},
          {"seed", s.seed},
          {"repetitions", s.repetitions},
          {"completed", s.completed},
          {"rms_xte_m", stat_json(s.rms_xte)},
          {"max_xte_m", stat_json(s.max_xte)},
          {"charge_ah", stat_json(s.charge_ah)},
          {"duration_s", stat_json(s.duration_s)},
          {"runs", runs}};
}

MetricsSummary summary_from_json(const nlohmann::json& j) {
  MetricsSummary s;
  s.name = j.at("name").get<std::string>();
  s.controller = j.at("controller").get<std::string>();
  s.condition = j.at("condition").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.repetitions = j.at("repetitions").get<int>();
  s.completed = j.at("completed").get<int>();
  s.rms_xte = stat_from(j.at("rms_xte_m"));
  s.max_xte = stat_from(j.at("max_xte_m"));
  s.charge_ah = stat_from(j.at("charge_ah"));
  s.duration_s = stat_from(j.at("duration_s"));
  for (const auto& r : j.at("runs")) {
    RunMetrics m;
    m.repetition = r.at("repetition").get<int>();
    m.seed = r.at("seed").get<std::uint64_t>();
    m.completed = r.at("completed").get<bool>();
    m.failure = r.at("failure").get<std::string>();
    m.rms_xte = r.at("rms_xte_m").get<double>();
    m.max_xte = r.at("max_xte_m").get<double>();
    m.charge_ah = r.at("charge_ah").get<double>();
    m.duration_s = r.at("duration_s").get<double>();
    s.runs.push_back(std::move(m));
  }
  return s;
}

nlohmann::json to_json(const ComparisonReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"condition", row.condition},
                    {"a", to_json(row.a)},
                    {"b", to_json(row.b)},
                    {"xte_reduction_pct", row.xte_reduction_pct}});
  }
  return {{"rows", rows}};
}

ComparisonReport report_from_json(const nlohmann::json& j) {
  ComparisonReport r;
  for (const auto& row : j.at("rows")) {
    r.rows.push_back({row.at("condition").get<std::string>(), summary_from_json(row.at("a")),
                      summary_from_json(row.at("b")), row.at("xte_reduction_pct").get<double>()});
  }
  return r;
}

std::string format_report(const ComparisonReport& r) {
  std::string out = fmt::format("{:<12} {:<5} {:>30} {:>30} {:>28} {:>6}\n", "condition",
                                "ctrl", "rms_xte_m mean [min, max]", "charge_ah mean [min, max]",
                                "duration_s mean [min, max]", "ok");
  for (const auto& row : r.rows) {
    for (const auto* s : {&row.a, &row.b}) {
      out += fmt::format("{:<12} {:<5} {:>30} {:>30} {:>28} {:>3}/{:<2}\n", row.condition,
                         s->controller, fmt_stat(s->rms_xte, 3), fmt_stat(s->charge_ah, 4),
                         fmt_stat(s->duration_s, 1), s->completed, s->repetitions);
    }
    out += fmt::format("{:<12} XTE reduction (A vs B): {:.1f}%\n", row.condition,
                       row.xte_reduction_pct);
  }
  return out;
}

void write_outputs(const std::filesystem::path& out_dir, const ScenarioResult& result) {
  std::filesystem::create_directories(out_dir);
  for (const auto& log : result.logs) {
    std::ofstream csv(out_dir / ("rep" + std::to_string(log.repetition) + ".csv"));
    if (!csv) throw ConfigError("cannot write to " + out_dir.string());
    write_csv(csv, log);
  }
  std::ofstream summary(out_dir / "summary.json");
  if (!summary) throw ConfigError("cannot write to " + out_dir.string());
  summary << to_json(result.summary).dump(2) << '\n';
}

}  // namespace usv::experiment
