// SPDX-License-Identifier: Apache-2.0
#include "wlanpace/plant_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wlanpace/errors.hpp"

namespace wlanpace {

void PlantConfig::validate() const {
  if (!(overhead_s > 0.0)) throw ConfigError("plant.overhead_s must be > 0");
  if (tx_time_s.empty()) throw ConfigError("plant.tx_time_s must be non-empty");
  for (double w : tx_time_s)
    if (!(w > 0.0)) throw ConfigError("plant.tx_time_s entries must be > 0");
  for (const auto& [slot, value] : overhead_schedule)
    if (!(value > 0.0))
      throw ConfigError("plant.overhead_schedule values must be > 0");
  for (const auto& [slot, values] : tx_time_schedule)
    if (values.size() != tx_time_s.size())
      throw ConfigError("plant.tx_time_schedule entries must match station count");
  if (noise_sigma < 0.0) throw ConfigError("plant.noise_sigma must be >= 0");
  if (!(slot_s > 0.0)) throw ConfigError("plant.slot_s must be > 0");
  if (!(max_frame_packets >= 1.0))
    throw ConfigError("plant.max_frame_packets must be >= 1");
}

Plant::Plant(PlantConfig cfg)
    : cfg_(std::move(cfg)),
      overhead_s_(cfg_.overhead_s),
      tx_time_s_(cfg_.tx_time_s),
      sigma_(cfg_.noise_sigma),
      sigma_base_(cfg_.noise_sigma),
      rng_(cfg_.seed) {
  cfg_.validate();
  apply_schedules();
}

void Plant::apply_schedules() {
  for (const auto& [slot, value] : cfg_.overhead_schedule)
    if (slot == slot_) overhead_s_ = value;
  for (const auto& [slot, values] : cfg_.tx_time_schedule)
    if (slot == slot_) tx_time_s_ = values;
}

void Plant::apply_disturbance(const DisturbanceEvent& event) {
  if (const auto* step = std::get_if<OverheadStep>(&event.change)) {
    if (!(step->overhead_s > 0.0))
      throw ConfigError("overhead_step value must be > 0");
    overhead_s_ = step->overhead_s;
  } else if (const auto* mcs = std::get_if<McsChange>(&event.change)) {
    if (mcs->station >= tx_time_s_.size()) {
      std::ostringstream os;
      os << "mcs_change station " << mcs->station << " out of range (plant has "
         << tx_time_s_.size() << " stations)";
      throw ConfigError(os.str());
    }
    if (!(mcs->rate_bps > 0.0))
      throw ConfigError("mcs_change rate must be > 0");
    tx_time_s_[mcs->station] = cfg_.packet_bits / mcs->rate_bps;
  } else if (const auto* burst = std::get_if<NoiseBurst>(&event.change)) {
    sigma_ = burst->sigma;
    burst_until_ = slot_ + burst->duration_slots;
  }
}

SlotMeasurement Plant::step(const RateVector& x) {
  apply_schedules();
  if (burst_until_ >= 0 && slot_ >= burst_until_) {
    sigma_ = sigma_base_;
    burst_until_ = -1;
  }

  const std::size_t n = tx_time_s_.size();
  if (x.size() != n)
    throw DimensionMismatchError("plant step: rate vector width mismatch");

  SlotMeasurement m;
  m.slot = slot_;
  m.measured.ppf.resize(n);
  m.frames.resize(n);
  m.phy_rate_bps.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    m.phy_rate_bps[i] = cfg_.packet_bits / tx_time_s_[i];

  double wx = 0.0;
  for (std::size_t i = 0; i < n; ++i) wx += tx_time_s_[i] * x.pps[i];

  std::vector<double> true_mean(n);
  if (wx >= 1.0) {
    // Offered airtime exceeds capacity: frames fill up and a backlog of
    // unserved airtime accumulates, drained at unit rate.
    m.overloaded = true;
    for (std::size_t i = 0; i < n; ++i)
      true_mean[i] = x.pps[i] > 0.0 ? cfg_.max_frame_packets : 1.0;
    backlog_s_ += (wx - 1.0) * cfg_.slot_s;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double raw = overhead_s_ * x.pps[i] / (1.0 - wx);
      true_mean[i] = std::clamp(raw, 1.0, cfg_.max_frame_packets);
    }
    backlog_s_ = std::max(0.0, backlog_s_ + (wx - 1.0) * cfg_.slot_s);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (x.pps[i] <= 0.0) {
      m.frames[i] = 0;
      m.measured.ppf[i] = 1.0;
      continue;
    }
    const long frames = std::max(
        1L, std::lround(x.pps[i] * cfg_.slot_s / true_mean[i]));
    m.frames[i] = frames;
    if (!cfg_.quantize_frames) {
      m.measured.ppf[i] = true_mean[i];
      continue;
    }
    double sum = 0.0;
    for (long f = 0; f < frames; ++f) {
      const double sample =
          std::round(true_mean[i] + sigma_ * rng_.next_gaussian());
      sum += std::clamp(sample, 1.0, cfg_.max_frame_packets);
    }
    m.measured.ppf[i] = sum / static_cast<double>(frames);
  }

  double frame_time = overhead_s_;
  for (std::size_t i = 0; i < n; ++i) frame_time += tx_time_s_[i] * true_mean[i];
  m.delay_s = frame_time + backlog_s_;

  ++slot_;
  return m;
}

}  // namespace wlanpace
