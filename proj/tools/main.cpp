#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <future>
#include <iostream>

#include "qepi/scenario.hpp"

namespace {

using qepi::RunReport;
using qepi::ScenarioConfig;

struct CommonFlags {
  int grid_points = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_path;
  bool parallel = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--grid-points", flags.grid_points, "override per-axis grid points");
  cmd->add_option("--tolerance", flags.tolerance, "override the entropic tolerance (nats)");
  cmd->add_option("--seed", flags.seed, "override the scenario seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--out", flags.out_path, "write the report (JSON / CSV) to this path");
  cmd->add_flag("--parallel", flags.parallel, "run scenarios concurrently");
}

void apply_overrides(ScenarioConfig& config, const CommonFlags& flags) {
  if (flags.grid_points > 0) {
    config.axis_x.points = flags.grid_points;
    config.axis_y.points = flags.grid_points;
  }
  if (flags.tolerance != 0.0) {
    if (flags.tolerance < 0.0) throw qepi::ConfigInvalid("--tolerance must be positive");
    config.tolerances.tol_entropic = flags.tolerance;
  }
  if (flags.seed_set) config.seed = flags.seed;
}

void print_report(const RunReport& report) {
  fmt::print("scenario {}  ({} checks, {:.0f} ms)\n", report.scenario.name,
             report.checks.size(), report.wall_ms);
  for (const auto& c : report.checks) {
    fmt::print("  [{}] {}  deficit={:+.3e}  tol={:.1e}  bar={:.1e}\n",
               qepi::to_string(c.verdict), c.name, c.deficit, c.tolerance, c.error_bar);
    for (const auto& n : c.notes) fmt::print("         note: {}\n", n);
  }
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw qepi::ConfigInvalid(fmt::format("cannot write '{}'", path));
  out << body;
}

int run_verify_cmd(const std::vector<std::string>& paths, const CommonFlags& flags) {
  std::vector<ScenarioConfig> configs;
  for (const auto& p : paths) {
    ScenarioConfig c = qepi::load_config_file(p);
    apply_overrides(c, flags);
    configs.push_back(std::move(c));
  }

  std::vector<RunReport> reports(configs.size());
  if (flags.parallel && configs.size() > 1) {
    std::vector<std::future<RunReport>> futures;
    futures.reserve(configs.size());
    for (const auto& c : configs) {
      futures.push_back(std::async(std::launch::async, [&c] { return qepi::run_verify(c); }));
    }
    for (std::size_t i = 0; i < futures.size(); ++i) reports[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < configs.size(); ++i) reports[i] = qepi::run_verify(configs[i]);
  }

  nlohmann::json out = nlohmann::json::array();
  int exit_code = 0;
  for (const auto& r : reports) {
    print_report(r);
    out.push_back(r.to_json());
    exit_code = std::max(exit_code, r.exit_code());
  }
  if (!flags.out_path.empty()) {
    write_text(flags.out_path, (out.size() == 1 ? out[0] : out).dump(2) + "\n");
  }
  return exit_code;
}

std::vector<double> parse_t_list(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double lo = 0, hi = 0;
    int count = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 2) {
      throw qepi::ConfigInvalid(fmt::format("bad t range '{}', expected lo:hi:count", spec));
    }
    for (int k = 0; k < count; ++k) out.push_back(lo + (hi - lo) * k / (count - 1));
    return out;
  }
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t next = spec.find(',', pos);
    if (next == std::string::npos) next = spec.size();
    try {
      out.push_back(std::stod(spec.substr(pos, next - pos)));
    } catch (const std::exception&) {
      throw qepi::ConfigInvalid(fmt::format("bad t value in '{}'", spec));
    }
    pos = next + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical checks of entropy power and Stam inequalities with a quantum conditioner"};
  app.require_subcommand(1);

  std::vector<std::string> verify_paths;
  CommonFlags verify_flags;
  CLI::App* verify = app.add_subcommand("verify", "run a scenario config's check list");
  verify->add_option("config", verify_paths, "scenario config file(s)")->required();
  add_common(verify, verify_flags);

  std::string sweep_path, sweep_quantity, sweep_t;
  CommonFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "emit t, value, error_bar rows as CSV");
  sweep->add_option("config", sweep_path, "scenario config file")->required();
  sweep->add_option("--quantity", sweep_quantity, "entropy_flow | fisher_flow | phi")->required();
  sweep->add_option("--t", sweep_t, "comma list or lo:hi:count")->required();
  add_common(sweep, sweep_flags);

  std::string demo_name;
  CommonFlags demo_flags;
  CLI::App* demo = app.add_subcommand("demo", "run a bundled scenario by name");
  demo->add_option("name", demo_name, "bundled scenario name")->required();
  add_common(demo, demo_flags);

  app.add_subcommand("list", "list bundled scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      return run_verify_cmd(verify_paths, verify_flags);
    }
    if (sweep->parsed()) {
      ScenarioConfig c = qepi::load_config_file(sweep_path);
      apply_overrides(c, sweep_flags);
      const auto rows = qepi::run_sweep(c, sweep_quantity, parse_t_list(sweep_t));
      const std::string csv = qepi::sweep_to_csv(rows);
      if (sweep_flags.out_path.empty()) {
        std::cout << csv;
      } else {
        write_text(sweep_flags.out_path, csv);
      }
      return 0;
    }
    if (demo->parsed()) {
      ScenarioConfig c = qepi::bundled_scenario(demo_name);
      apply_overrides(c, demo_flags);
      RunReport report = qepi::run_verify(c);
      print_report(report);
      if (!demo_flags.out_path.empty()) {
        write_text(demo_flags.out_path, report.to_json().dump(2) + "\n");
      }
      return report.exit_code();
    }
    for (const auto& info : qepi::list_scenarios()) {
      fmt::print("{:24} {}\n", info.name, info.description);
    }
    return 0;
  } catch (const qepi::ConfigInvalid& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 1;
  } catch (const qepi::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
