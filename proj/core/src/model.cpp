// SPDX-License-Identifier: Apache-2.0
#include "wlanpace/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wlanpace/errors.hpp"

namespace wlanpace {

namespace {

void check_dimension(std::size_t got, const WlanModelConfig& cfg, const char* what) {
  if (got != cfg.stations) {
    std::ostringstream os;
    os << what << " has " << got << " entries, model has " << cfg.stations
       << " stations";
    throw DimensionMismatchError(os.str());
  }
}

// Compensated accumulation (Neumaier, with exact product residuals via fma).
// The spare-airtime term 1 - w'x sits close to cancellation at high load, so
// plain summation loses several digits that the identities in this module
// are specified to keep.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  void add_product(double a, double b) {
    const double p = a * b;
    add(p);
    comp += std::fma(a, b, -p);
  }
  double value() const { return sum + comp; }
};

double spare_airtime(const RateVector& x, const WlanModelConfig& cfg) {
  CompensatedSum s;
  s.add(1.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    s.add_product(-cfg.tx_time_s[i], x.pps[i]);
  return s.value();
}

}  // namespace

void WlanModelConfig::validate() const {
  if (stations < 1) throw ConfigError("model.stations must be >= 1");
  if (!(overhead_s > 0.0)) throw ConfigError("model.overhead_s must be > 0");
  if (tx_time_s.size() != stations)
    throw ConfigError("model.tx_time_s length must equal model.stations");
  for (double w : tx_time_s)
    if (!(w > 0.0)) throw ConfigError("model.tx_time_s entries must be > 0");
  if (!(max_frame_packets >= 1.0))
    throw ConfigError("model.max_frame_packets must be >= 1");
  if (!(packet_bits > 0.0)) throw ConfigError("model.packet_bits must be > 0");
}

double airtime(const RateVector& x, const WlanModelConfig& cfg) {
  check_dimension(x.size(), cfg, "rate vector");
  CompensatedSum s;
  for (std::size_t i = 0; i < x.size(); ++i)
    s.add_product(cfg.tx_time_s[i], x.pps[i]);
  return s.value();
}

bool feasible(const RateVector& x, const WlanModelConfig& cfg) {
  check_dimension(x.size(), cfg, "rate vector");
  for (double v : x.pps)
    if (v < 0.0) return false;
  return airtime(x, cfg) < 1.0 - kFeasibilityMargin;
}

AggregationResult aggregation_map(const RateVector& x, const WlanModelConfig& cfg) {
  if (!feasible(x, cfg)) {
    std::ostringstream os;
    const double a = airtime(x, cfg);
    os << "infeasible rate vector: airtime w'x = " << a << " must be < 1";
    throw InfeasibleRateError(os.str(), a);
  }
  const double spare = spare_airtime(x, cfg);
  AggregationResult out;
  out.raw.ppf.resize(x.size());
  out.projected.ppf.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double raw = cfg.overhead_s * x.pps[i] / spare;
    out.raw.ppf[i] = raw;
    out.projected.ppf[i] = std::clamp(raw, 1.0, cfg.max_frame_packets);
  }
  return out;
}

RateVector inverse_aggregation_map(const AggregationVector& n, const WlanModelConfig& cfg) {
  check_dimension(n.size(), cfg, "aggregation vector");
  const double frame_time = delay_from_aggregation(n, cfg);  // c + w'N > 0
  RateVector x;
  x.pps.resize(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) x.pps[i] = n.ppf[i] / frame_time;
  return x;
}

std::vector<double> mean_delay(const RateVector& x, const WlanModelConfig& cfg) {
  if (!feasible(x, cfg)) {
    const double a = airtime(x, cfg);
    throw InfeasibleRateError("mean_delay: infeasible rate vector", a);
  }
  const double busy = cfg.overhead_s / spare_airtime(x, cfg);
  std::vector<double> delay(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.pps[i] <= 0.0)
      throw UndefinedDelayError("mean_delay undefined at zero send rate", i);
    const double inter_packet = 1.0 / x.pps[i];
    delay[i] =
        std::max(std::min(busy, cfg.max_frame_packets * inter_packet), inter_packet);
  }
  return delay;
}

double delay_from_aggregation(const AggregationVector& n, const WlanModelConfig& cfg) {
  check_dimension(n.size(), cfg, "aggregation vector");
  CompensatedSum s;
  s.add(cfg.overhead_s);
  for (std::size_t i = 0; i < n.size(); ++i)
    s.add_product(cfg.tx_time_s[i], n.ppf[i]);
  return s.value();
}

namespace {

// VHT 80 MHz, long GI, data rates in Mbps per published rate tables.
// MCS 2/4/9 at NSS 1 carry the values used throughout the delay arithmetic
// in this project (87.7 / 175.5 / 390 Mbps). MCS 6 at NSS 3 is not a valid
// combination at 80 MHz and is marked 0.
constexpr double kVht80LongGiMbps[10][3] = {
    // NSS 1   NSS 2   NSS 3
    {29.3, 58.5, 87.8},      // MCS 0
    {58.5, 117.0, 175.5},    // MCS 1
    {87.7, 175.5, 263.3},    // MCS 2
    {117.0, 234.0, 351.0},   // MCS 3
    {175.5, 351.0, 526.5},   // MCS 4
    {234.0, 468.0, 702.0},   // MCS 5
    {263.3, 526.5, 0.0},     // MCS 6 (invalid at NSS 3)
    {292.5, 585.0, 877.5},   // MCS 7
    {351.0, 702.0, 1053.0},  // MCS 8
    {390.0, 780.0, 1170.0},  // MCS 9
};

}  // namespace

double vht80_rate_bps(int mcs_index, int nss) {
  if (mcs_index < 0 || mcs_index > 9 || nss < 1 || nss > 3) {
    std::ostringstream os;
    os << "no VHT80 entry for MCS " << mcs_index << ", NSS " << nss;
    throw McsLookupError(os.str());
  }
  const double mbps = kVht80LongGiMbps[mcs_index][nss - 1];
  if (mbps <= 0.0) {
    std::ostringstream os;
    os << "MCS " << mcs_index << " / NSS " << nss << " is excluded at 80 MHz";
    throw McsLookupError(os.str());
  }
  return mbps * 1e6;
}

double mcs_to_w(int mcs_index, int nss, double packet_bits) {
  return packet_bits / vht80_rate_bps(mcs_index, nss);
}

}  // namespace wlanpace
