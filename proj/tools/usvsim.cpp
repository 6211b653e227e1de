// usvsim: run scenarios, compare controllers and verify the vessel model.
//
//   usvsim run <config> [--seed N] [--out-dir DIR] [--timeout-s T] [--quiet]
//   usvsim compare <config_a> <config_b> [...]
//   usvsim verify [<config>]
//
// Exit codes: 0 success, 2 configuration error, 3 failed runs or checks.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <optional>

#include "usv/errors.hpp"
#include "usv/experiment.hpp"

namespace {

namespace ex = usv::experiment;

constexpr int kExitConfig = 2;
constexpr int kExitFailed = 3;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<double> timeout_s;
  std::string out_dir = "out";
  bool quiet = false;
};

ex::ScenarioConfig load(const std::string& path, const Common& opts) {
  ex::ScenarioConfig cfg = ex::load_scenario(path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.timeout_s) cfg.timeout_s = *opts.timeout_s;
  cfg.validate();
  return cfg;
}

void print_failures(const ex::MetricsSummary& s) {
  for (const auto& r : s.runs) {
    if (!r.completed) std::cerr << fmt::format("{} rep{}: FAILED ({})\n", s.name, r.repetition, r.failure);
  }
}

int cmd_run(const std::string& config, const Common& opts) {
  const ex::ScenarioConfig cfg = load(config, opts);
  const ex::ScenarioResult result = ex::run_scenario(cfg);
  const std::filesystem::path dir = std::filesystem::path(opts.out_dir) / cfg.name;
  ex::write_outputs(dir, result);
  const auto& s = result.summary;
  if (!opts.quiet) {
    std::cout << fmt::format("{} [{} / {}] {}/{} runs completed\n", s.name, s.controller,
                             s.condition, s.completed, s.repetitions);
    if (s.rms_xte) {
      std::cout << fmt::format("  rms_xte   {:.4f} m  [{:.4f}, {:.4f}]\n", s.rms_xte->mean,
                               s.rms_xte->min, s.rms_xte->max);
      std::cout << fmt::format("  charge    {:.5f} Ah [{:.5f}, {:.5f}]\n", s.charge_ah->mean,
                               s.charge_ah->min, s.charge_ah->max);
      std::cout << fmt::format("  duration  {:.1f} s\n", s.duration_s->mean);
    }
    std::cout << "  wrote " << dir.string() << '\n';
  }
  print_failures(s);
  return s.all_completed() ? 0 : kExitFailed;
}

int cmd_compare(const std::string& a, const std::string& b, const Common& opts) {
  const ex::ScenarioConfig cfg_a = load(a, opts);
  const ex::ScenarioConfig cfg_b = load(b, opts);
  const ex::ComparisonReport report = ex::compare(cfg_a, cfg_b);
  std::filesystem::create_directories(opts.out_dir);
  const auto path = std::filesystem::path(opts.out_dir) /
                    fmt::format("compare_{}_vs_{}.json", cfg_a.name, cfg_b.name);
  std::ofstream(path) << ex::to_json(report).dump(2) << '\n';
  if (!opts.quiet) {
    std::cout << ex::format_report(report);
    std::cout << "wrote " << path.string() << '\n';
  }
  bool ok = true;
  for (const auto& row : report.rows) {
    print_failures(row.a);
    print_failures(row.b);
    ok = ok && row.a.all_completed() && row.b.all_completed();
  }
  return ok ? 0 : kExitFailed;
}

int cmd_verify(const std::optional<std::string>& config, const Common& opts) {
  const usv::sim::VesselParams params =
      config ? load(*config, opts).vessel : usv::sim::VesselParams::defaults();
  bool ok = true;
  for (const auto& check : usv::sim::verify_manoeuvres(params)) {
    ok = ok && check.passed;
    if (!opts.quiet || !check.passed) {
      std::cout << fmt::format("{:<32} {:>14.6g}  (threshold {:g})  {}\n", check.name, check.value,
                               check.threshold, check.passed ? "PASS" : "FAIL");
    }
  }
  return ok ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"USV trajectory-tracking testbed: ADRC vs PID"};
  app.require_subcommand(1);
  Common opts;
  std::uint64_t seed = 0;
  double timeout = 0.0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Override the scenario seed")
        ->each([&](const std::string&) { opts.seed = seed; });
    sub->add_option("--timeout-s", timeout, "Override the per-run timeout [s]")
        ->each([&](const std::string&) { opts.timeout_s = timeout; });
    sub->add_option("--out-dir", opts.out_dir, "Output directory")->capture_default_str();
    sub->add_flag("--quiet", opts.quiet, "Suppress progress output");
  };

  std::string config;
  auto* run = app.add_subcommand("run", "Run one scenario; writes <out-dir>/<name>/rep<i>.csv and summary.json");
  run->add_option("config", config, "Scenario file")->required();
  add_common(run);

  std::string config_a;
  std::string config_b;
  auto* cmp = app.add_subcommand("compare", "Run two scenarios under all four conditions");
  cmp->add_option("config_a", config_a, "Scenario A")->required();
  cmp->add_option("config_b", config_b, "Scenario B")->required();
  add_common(cmp);

  std::string verify_config;
  auto* verify = app.add_subcommand("verify", "Zig-zag / spin regression of the vessel model");
  verify->add_option("config", verify_config, "Optional scenario file for vessel parameters");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, opts);
    if (*cmp) return cmd_compare(config_a, config_b, opts);
    if (*verify) {
      return cmd_verify(verify_config.empty() ? std::nullopt : std::optional(verify_config), opts);
    }
  } catch (const usv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return 0;
}
