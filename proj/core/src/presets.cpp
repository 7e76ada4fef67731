// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include "wlanpace/errors.hpp"
#include "wlanpace/scenario.hpp"

namespace wlanpace {

namespace {

constexpr double kPerStationOverheadS = 2e-4;

Scenario base_scenario(std::size_t stations, int mcs, double delay_target_s,
                       double agg_cap) {
  Scenario s;
  s.model.stations = stations;
  s.model.overhead_s = kPerStationOverheadS * static_cast<double>(stations);
  s.model.tx_time_s.assign(stations, mcs_to_w(mcs, 1));
  s.targets.delay_target_s = delay_target_s;
  s.targets.agg_cap = agg_cap;
  s.plant.overhead_s = s.model.overhead_s;
  s.plant.tx_time_s = s.model.tx_time_s;
  return s;
}

// Aggregation-loop step responses: target pinned at 32 packets, a gain grid
// over k1 and two WLAN sizes. The controller's overhead estimate is set 1.5x
// low so the loop-gain effect of the mismatch is visible in the transients.
std::vector<Scenario> preset_step_k1() {
  std::vector<Scenario> out;
  for (std::size_t n : {std::size_t{1}, std::size_t{10}}) {
    for (double k1 : {0.1, 0.3, 0.5, 0.8}) {
      Scenario s = base_scenario(n, 9, 2.5e-3, 48.0);
      s.mode = RunMode::inner_only;
      s.inner_target = 32.0;
      s.gains.k1 = k1;
      s.c_hat0_s = s.plant.overhead_s / 1.5;
      s.duration_slots = 120;
      std::ostringstream name;
      name << "step_k1_n" << n << "_k" << k1;
      s.name = name.str();
      out.push_back(std::move(s));
    }
  }
  return out;
}

// Delay regulation at a 2.5 ms budget across three PHY rates (one station).
std::vector<Scenario> preset_delay_reg() {
  std::vector<Scenario> out;
  for (int mcs : {2, 4, 9}) {
    Scenario s = base_scenario(1, mcs, 2.5e-3, 48.0);
    s.plant.noise_sigma = 1.0;
    s.duration_slots = 300;
    std::ostringstream name;
    name << "delay_reg_mcs" << mcs;
    s.name = name.str();
    out.push_back(std::move(s));
  }
  return out;
}

// Overhead-estimator tracking: the true round overhead steps from 200 us to
// 2200 us mid-run, as happens when many stations join the WLAN.
std::vector<Scenario> preset_c_track() {
  Scenario s = base_scenario(1, 9, 2.5e-3, 48.0);
  s.duration_slots = 400;
  s.name = "c_track";
  DisturbanceEvent ev;
  ev.at_slot = 150;
  ev.change = OverheadStep{2.2e-3};
  s.disturbances.push_back(ev);
  return {s};
}

// Noise-free matched loop with exact (unquantized) measurements; settles on
// the closed-form allocation. Useful as a regression reference.
std::vector<Scenario> preset_closed_loop_fp() {
  Scenario s = base_scenario(1, 2, 2.5e-3, 48.0);
  s.plant.quantize_frames = false;
  s.duration_slots = 400;
  s.name = "closed_loop_fp";
  return {s};
}

// Base point for delay-target sweeps (pair with: sweep --axis t_bar).
std::vector<Scenario> preset_sweep_base() {
  Scenario s = base_scenario(10, 9, 10e-3, 48.0);
  s.plant.noise_sigma = 1.0;
  s.duration_slots = 400;
  s.name = "sweep_base";
  return {s};
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"step_k1", "delay_reg", "c_track", "closed_loop_fp", "sweep_base"};
}

std::vector<Scenario> make_preset(const std::string& name) {
  if (name == "step_k1") return preset_step_k1();
  if (name == "delay_reg") return preset_delay_reg();
  if (name == "c_track") return preset_c_track();
  if (name == "closed_loop_fp") return preset_closed_loop_fp();
  if (name == "sweep_base") return preset_sweep_base();
  throw ConfigError("unknown preset: " + name);
}

}  // namespace wlanpace
