// SPDX-License-Identifier: Apache-2.0
//
// wlanpace CLI: proportional-fair low-delay rate allocation and closed-loop
// simulation for aggregation-based 802.11ac downlinks.
//
//   wlanpace solve  --config cfg.json [--oracle] [--out DIR]
//   wlanpace run    (--config scenario.json | --preset NAME) [--seed N] [--out DIR]
//   wlanpace sweep  --config scenario.json --axis {t_bar|n|mcs} --values a,b,c
//   wlanpace presets list
//
// WLANPACE_OUT overrides the output directory.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wlanpace/errors.hpp"
#include "wlanpace/scenario.hpp"

namespace {

using namespace wlanpace;

std::filesystem::path output_dir(const std::string& flag_value) {
  if (const char* env = std::getenv("WLANPACE_OUT"); env && *env)
    return std::filesystem::path(env);
  return std::filesystem::path(flag_value.empty() ? "." : flag_value);
}

void apply_seed(Scenario& s, const std::optional<std::uint64_t>& seed) {
  if (seed) s.plant.seed = *seed;
}

int cmd_solve(const std::string& config, bool oracle, const std::string& out) {
  const Scenario s = scenario_from_file(config);
  const PfSolution sol = solve_fixed_point(s.model, s.targets);
  // At the delay_infeasible floor the allocation sits outside the feasible
  // set, so the certificate cannot verify; report it unaccepted.
  KktCertificate cert;
  std::string violation;
  try {
    cert = verify_kkt(sol, s.model, s.targets);
  } catch (const FeasibilityError& e) {
    cert.lambda.assign(s.model.stations, 0.0);
    violation = e.what();
  }
  std::optional<RateVector> bf;
  if (oracle && s.model.stations <= 3 && sol.regime != Regime::delay_infeasible)
    bf = brute_force_oracle(s.model, s.targets);
  const std::string doc = solution_json(sol, cert, bf ? &*bf : nullptr);
  std::cout << doc << '\n';
  if (!violation.empty()) std::cerr << "feasibility: " << violation << '\n';
  if (!out.empty()) {
    const auto dir = output_dir(out);
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / (s.name + "_solution.json"), doc + "\n");
  }
  if (sol.regime == Regime::delay_infeasible || !cert.accepted) return 2;
  return 0;
}

int run_and_write(const Scenario& s, const std::filesystem::path& dir) {
  const RunResult res = run(s);
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / (s.name + ".csv");
  write_file_atomic(csv_path, to_csv(res));
  std::printf(
      "%s: %ld slots, rise %.1f slots, overshoot %.3f, steady err %.4g, "
      "delay rms %.4g ms, converged %s -> %s\n",
      s.name.c_str(), s.duration_slots, res.metrics.rise_time_slots,
      res.metrics.overshoot_fraction, res.metrics.steady_state_error,
      res.metrics.delay_rms_error * 1e3, res.metrics.converged ? "yes" : "no",
      csv_path.string().c_str());
  return 0;
}

int cmd_run(const std::string& config, const std::string& preset,
            const std::optional<std::uint64_t>& seed, const std::string& out) {
  const auto dir = output_dir(out);
  if (!preset.empty()) {
    for (Scenario s : make_preset(preset)) {
      apply_seed(s, seed);
      run_and_write(s, dir);
    }
    return 0;
  }
  Scenario s = scenario_from_file(config);
  apply_seed(s, seed);
  return run_and_write(s, dir);
}

int cmd_sweep(const std::string& config, const std::string& axis_name,
              const std::vector<double>& values,
              const std::optional<std::uint64_t>& seed, const std::string& out) {
  Scenario s = scenario_from_file(config);
  apply_seed(s, seed);
  const SweepAxis axis = sweep_axis_from_string(axis_name);
  const auto rows = sweep(s, axis, values);
  const std::string csv = to_csv(rows);
  std::cout << csv;
  if (!out.empty()) {
    const auto dir = output_dir(out);
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / (s.name + "_sweep_" + axis_name + ".csv"), csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proportional-fair low-delay rate control for 802.11ac downlinks"};
  app.require_subcommand(1);

  std::string config, out, axis, preset;
  std::vector<double> values;
  std::optional<std::uint64_t> seed;
  bool oracle = false;

  auto* solve = app.add_subcommand("solve", "closed-form allocation + KKT check");
  solve->add_option("--config", config, "model/targets JSON")->required();
  solve->add_flag("--oracle", oracle, "cross-check against the brute-force oracle");
  solve->add_option("--out", out, "directory for the solution JSON");

  auto* runc = app.add_subcommand("run", "simulate one scenario, write CSV");
  runc->add_option("--config", config, "scenario JSON");
  runc->add_option("--preset", preset, "built-in scenario family");
  runc->add_option("--seed", seed, "plant RNG seed override");
  runc->add_option("--out", out, "output directory (default .)");

  auto* sweepc = app.add_subcommand("sweep", "run a scenario across axis values");
  sweepc->add_option("--config", config, "base scenario JSON")->required();
  sweepc->add_option("--axis", axis, "t_bar, n or mcs")->required();
  sweepc->add_option("--values", values, "axis values")->required()->delimiter(',');
  sweepc->add_option("--seed", seed, "plant RNG seed override");
  sweepc->add_option("--out", out, "output directory");

  auto* presets = app.add_subcommand("presets", "preset registry");
  auto* list = presets->add_subcommand("list", "list preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config, oracle, out);
    if (runc->parsed()) {
      if (config.empty() == preset.empty()) {
        std::cerr << "run needs exactly one of --config or --preset\n";
        return 1;
      }
      return cmd_run(config, preset, seed, out);
    }
    if (sweepc->parsed()) return cmd_sweep(config, axis, values, seed, out);
    if (presets->parsed()) {
      if (list->parsed()) {
        for (const auto& name : preset_names()) std::cout << name << '\n';
        return 0;
      }
      std::cerr << "usage: wlanpace presets list\n";
      return 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
