// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wlanpace/controller.hpp"
#include "wlanpace/plant_sim.hpp"

namespace wlanpace {

enum class RunMode { closed_loop, inner_only, open_loop_solve };

std::string to_string(RunMode m);
RunMode run_mode_from_string(const std::string& s);

/// A complete experiment: model and targets for the controller, ground
/// truth for the plant, disturbances, and run shape.
struct Scenario {
  std::string name = "scenario";
  WlanModelConfig model;
  QosTargets targets;
  ControllerGains gains;
  std::optional<double> c_hat0_s;  // controller's initial overhead estimate
  PlantConfig plant;
  std::vector<DisturbanceEvent> disturbances;
  long duration_slots = 400;
  RunMode mode = RunMode::closed_loop;
  double inner_target = 32.0;  // fixed aggregation target in inner_only mode

  void validate() const;
};

/// Step-response and regulation quality measured from a run.
struct RunMetrics {
  double rise_time_slots = 0.0;     // 10% -> 90% of the response step
  double overshoot_fraction = 0.0;  // beyond-final excursion / step size
  double steady_state_error = 0.0;  // mean |response - target|, final 20%
  double delay_rms_error = 0.0;     // rms(delay - delay_target), final 20%
  bool converged = false;           // steady-state error within 5% of target
};

/// One CSV row.
struct SlotRecord {
  long slot = 0;
  double time_s = 0.0;
  std::vector<double> x_pps;      // rates applied during the slot
  std::vector<double> n_meas;     // measured aggregation
  std::vector<double> n_target;   // controller target during the slot
  double nu = 0.0;
  double c_hat_s = 0.0;
  double delay_s = 0.0;
  bool overloaded = false;
};

struct RunResult {
  std::vector<SlotRecord> series;
  RunMetrics metrics;
  PfSolution reference;  // closed-form allocation for the scenario's model
};

/// Executes the slotted loop {disturbances -> plant step -> controller
/// update -> new rates}. Deterministic for a fixed scenario and seed.
RunResult run(const Scenario& scenario);

/// Fixed CSV layout:
/// slot,time_s,x_pps_<i>...,n_meas_<i>...,n_target_<i>...,nu,c_hat_us,delay_ms,overloaded
std::string to_csv(const RunResult& result);

/// Writes content to path via a temporary file and atomic rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

enum class SweepAxis { delay_target, stations, mcs };

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

/// Steady-state statistics for one sweep point (final half of the run).
struct SweepRow {
  double axis_value = 0.0;
  double mean_delay_s = 0.0;
  double mean_rate_mbps = 0.0;  // total goodput at 1500 B payloads
  double p75_delay_s = 0.0;     // nearest-rank percentiles
  double p75_rate_mbps = 0.0;
  Regime regime = Regime::interior;
};

/// Runs one scenario per axis value (in parallel; run i uses seed
/// base_seed + i) and aggregates steady-state statistics.
std::vector<SweepRow> sweep(const Scenario& base, SweepAxis axis,
                            const std::vector<double>& values);

std::string to_csv(const std::vector<SweepRow>& rows);

/// Applies one sweep-axis value to a copy of the base scenario.
Scenario apply_axis(const Scenario& base, SweepAxis axis, double value);

// --- JSON configuration ---------------------------------------------------

/// Parses a scenario document. Missing plant fields default to the model
/// (a matched plant). Throws ConfigError with field context on malformed
/// input.
Scenario scenario_from_json(const std::string& text);
Scenario scenario_from_file(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& scenario);

/// JSON rendering of a solution plus its certificate, as printed by the
/// solve subcommand. When oracle rates are supplied an agreement block is
/// included.
std::string solution_json(const PfSolution& sol, const KktCertificate& cert,
                          const RateVector* oracle = nullptr);

// --- Presets ---------------------------------------------------------------

/// Families of ready-made scenarios mirroring the standard experiments.
std::vector<std::string> preset_names();

/// All member scenarios of a named preset family. Throws ConfigError for an
/// unknown name.
std::vector<Scenario> make_preset(const std::string& name);

}  // namespace wlanpace
