// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "wlanpace/model.hpp"
#include "wlanpace/rng.hpp"

namespace wlanpace {

/// Replace the true round overhead.
struct OverheadStep {
  double overhead_s = 0.0;
};

/// Replace one station's true PHY rate.
struct McsChange {
  std::size_t station = 0;
  double rate_bps = 0.0;
};

/// Temporarily raise the per-frame sampling noise.
struct NoiseBurst {
  double sigma = 0.0;
  long duration_slots = 0;
};

struct DisturbanceEvent {
  long at_slot = 1;
  std::variant<OverheadStep, McsChange, NoiseBurst> change;
};

/// Ground-truth WLAN parameters and measurement behaviour.
///
/// Schedules are (from_slot, value) breakpoints applied when the simulator
/// reaches that slot; the initial value is the entry at slot 0 (or the
/// plain fields below when no schedule is given).
struct PlantConfig {
  double overhead_s = 2e-4;              // initial true c
  std::vector<double> tx_time_s;         // initial true per-packet times
  std::vector<std::pair<long, double>> overhead_schedule;
  std::vector<std::pair<long, std::vector<double>>> tx_time_schedule;
  double noise_sigma = 0.0;              // per-frame sample std dev, packets
  double slot_s = 0.1;                   // control interval
  double max_frame_packets = 64.0;
  double packet_bits = kDefaultPacketBits;
  bool quantize_frames = true;           // false = report exact means
  std::uint64_t seed = 1;

  void validate() const;
};

/// What the receivers report for one slot.
struct SlotMeasurement {
  AggregationVector measured;        // empirical mean packets/frame
  std::vector<long> frames;          // frames observed per station
  std::vector<double> phy_rate_bps;  // observed PHY rate per station
  double delay_s = 0.0;              // mean frame delay incl. backlog drain
  bool overloaded = false;
  long slot = 0;
};

/// Slotted simulator of the actual WLAN: true time-varying overhead and PHY
/// rates, per-frame sampling noise, and a fluid queue that models sustained
/// overload. One instance per run; stepping is sequential.
class Plant {
 public:
  explicit Plant(PlantConfig cfg);

  /// Advance one slot with send rates held at x. Never throws on overload;
  /// that is a modelled state.
  SlotMeasurement step(const RateVector& x);

  /// Apply an event scheduled for the current slot. Throws ConfigError for
  /// an unknown station index.
  void apply_disturbance(const DisturbanceEvent& event);

  long slot() const { return slot_; }
  double overhead_s() const { return overhead_s_; }
  const std::vector<double>& tx_time_s() const { return tx_time_s_; }
  double backlog_s() const { return backlog_s_; }
  double noise_sigma() const { return sigma_; }

 private:
  void apply_schedules();

  PlantConfig cfg_;
  double overhead_s_;
  std::vector<double> tx_time_s_;
  double sigma_;
  double sigma_base_;
  long burst_until_ = -1;
  double backlog_s_ = 0.0;
  long slot_ = 1;  // slots are 1-based
  Rng rng_;
};

}  // namespace wlanpace
