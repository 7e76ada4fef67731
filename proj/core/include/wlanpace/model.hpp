// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace wlanpace {

/// On-air bits per packet: 1500 B payload + 48 B MAC overhead.
inline constexpr double kDefaultPacketBits = (1500.0 + 48.0) * 8.0;

/// Numerical margin for the strict feasibility test w'x < 1.
inline constexpr double kFeasibilityMargin = 1e-9;

/// Controller-side model of a paced 802.11ac downlink.
///
/// A transmission round serves every station once: `overhead_s` is the fixed
/// channel time per round (contention, PHY/MAC headers, ACKs, summed over
/// the n stations) and `tx_time_s[i]` is the time to put one packet on air
/// for station i at its PHY rate.
struct WlanModelConfig {
  std::size_t stations = 1;                   // n
  double overhead_s = 2e-4;                   // c, seconds per round
  std::vector<double> tx_time_s;              // w_i, seconds per packet
  double max_frame_packets = 64.0;            // hard frame aggregation limit
  double packet_bits = kDefaultPacketBits;    // on-air bits per packet

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Mean send rates, packets per second, one entry per station.
struct RateVector {
  std::vector<double> pps;

  std::size_t size() const { return pps.size(); }
};

/// Mean packets per transmitted frame, one entry per station.
struct AggregationVector {
  std::vector<double> ppf;

  std::size_t size() const { return ppf.size(); }
};

/// Aggregation response both before and after projection onto
/// [1, max_frame_packets]. Mismatch analysis needs the raw/projected ratio,
/// so both are kept.
struct AggregationResult {
  AggregationVector raw;        // c*x / (1 - w'x), unprojected
  AggregationVector projected;  // clamped elementwise to [1, n_max]
};

/// Total airtime fraction w'x.
double airtime(const RateVector& x, const WlanModelConfig& cfg);

/// True iff every x_i >= 0 and w'x < 1 (strict, with a small margin).
bool feasible(const RateVector& x, const WlanModelConfig& cfg);

/// Mean aggregation level reached when pacing at rates x.
/// Throws InfeasibleRateError when w'x >= 1.
AggregationResult aggregation_map(const RateVector& x, const WlanModelConfig& cfg);

/// Rate vector that produces mean aggregation N: x = N / (c + w'N).
/// The result always satisfies w'x < 1.
RateVector inverse_aggregation_map(const AggregationVector& n, const WlanModelConfig& cfg);

/// Per-station mean packet delay at rates x:
/// max{ min{ c/(1-w'x), n_max/x_i }, 1/x_i }.
/// Throws InfeasibleRateError on w'x >= 1 and UndefinedDelayError on x_i = 0.
std::vector<double> mean_delay(const RateVector& x, const WlanModelConfig& cfg);

/// Frame delay expressed in aggregation terms: c + w'N. Equals
/// c/(1 - w'x) at x = inverse_aggregation_map(N).
double delay_from_aggregation(const AggregationVector& n, const WlanModelConfig& cfg);

/// PHY data rate in bits/s for a VHT 80 MHz long-GI configuration.
/// Throws McsLookupError for combinations outside the table (including the
/// excluded MCS 6 / NSS 3 point).
double vht80_rate_bps(int mcs_index, int nss);

/// Per-packet transmit time packet_bits / rate(mcs, nss).
double mcs_to_w(int mcs_index, int nss, double packet_bits = kDefaultPacketBits);

}  // namespace wlanpace
