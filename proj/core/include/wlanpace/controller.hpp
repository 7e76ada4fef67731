// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wlanpace/model.hpp"
#include "wlanpace/pf_solver.hpp"

namespace wlanpace {

/// Loop gains. k1 drives the per-station aggregation loop, k2 the delay
/// loop, beta the overhead-estimator smoothing.
struct ControllerGains {
  double k1 = 0.5;
  double k2 = 0.2;
  double beta = 0.05;

  void validate() const;
};

/// Per-slot feedback from the receivers: empirical mean packets per frame
/// and the observed PHY rate of each station.
struct FeedbackReport {
  AggregationVector measured;        // mean packets/frame over the slot
  std::vector<double> phy_rate_bps;  // per-station observed PHY rate
  long slot = 0;
};

/// Mutable controller state. Single-owner value; updates are sequential.
struct ControllerState {
  std::vector<double> z;    // internal aggregation setpoints, in [1, n_max]
  double nu = 1.0;          // anchor aggregation level, in [1, agg_cap]
  double c_hat = 0.0;       // estimated round overhead, seconds
  WeightVector weights;     // recomputed from reported PHY rates each slot
  WlanModelConfig model;    // tx_time_s tracks reports; overhead_s == c_hat
  QosTargets targets;
  ControllerGains gains;
  RateVector last_rates;    // rates applied during the slot being reported
  long slot = 0;
};

/// Cold-start overhead estimate: n * (CW/2) * slot_time with CW = 16 and a
/// 9 us PHY slot.
double default_initial_overhead(std::size_t stations);

/// Cascaded integral controller. Inner loop steers each station's
/// aggregation level to min{nu W, cap}; outer loop steers nu so the
/// anchor station's frame delay meets the target; an exponential estimator
/// tracks the round overhead.
class Controller {
 public:
  /// Starts from z = 1, nu = 1 and, unless one is supplied, the cold-start
  /// overhead estimate from default_initial_overhead().
  Controller(WlanModelConfig model, QosTargets targets, ControllerGains gains,
             std::optional<double> initial_overhead_s = std::nullopt);

  const ControllerState& state() const { return state_; }
  ControllerState& mutable_state() { return state_; }

  /// Full slot update in fixed order: estimate overhead, refresh weights
  /// from the reported PHY rates, inner update, outer update, new rates.
  RateVector step(const FeedbackReport& report);

  /// Overhead estimate from the anchor station's measurement:
  /// c_check = (measured / x_anchor) (1 - w'x); c_hat blends with weight
  /// beta. Skipped when the anchor rate is zero.
  void estimate_c(const FeedbackReport& report);

  /// Re-sorts stations by reported transmit time and rebuilds W.
  void refresh_weights(const FeedbackReport& report);

  /// z <- clamp(z + k1 (min{nu W, cap} - measured), 1, n_max).
  /// Throws DimensionMismatchError if the report width is wrong.
  void inner_update(const FeedbackReport& report);

  /// nu <- clamp(nu + k2 (min{T x_anchor, cap} - nu), 1, cap) with
  /// x = inverse map of z under the current overhead estimate.
  void outer_update();

  /// x = z / (c_hat + w'z).
  RateVector compute_rates() const;

  /// min{nu W, cap} elementwise.
  std::vector<double> target_aggregation() const;

 private:
  ControllerState state_;
};

/// Snapshot of the controller state as a JSON object string with fields
/// slot, z, nu, c_hat, x, N_target.
std::string state_json(const ControllerState& state);

/// Loop-gain diagnostics against plant truth (test harness use).
/// gamma_i = clamp(c_true z_i / c_hat, 1, n_max) / z_i is the effective
/// inner-loop gain; gamma0 < 1 signals the cap limiting the outer setpoint.
struct LoopDiagnostics {
  std::vector<double> gamma;
  double gamma0 = 1.0;
};

LoopDiagnostics loop_diagnostics(const ControllerState& state, double c_true);

/// One step of the scalar delay-loop recursion under the fast-inner-loop
/// assumption z = nu W:
///   nu <- clamp(nu - k2 (nu - min{T nu / (c + nu n w1), cap}), 1, cap).
/// Used by the stability test suites.
double separated_outer_step(double nu, double k2, double delay_target_s,
                            double overhead_s, std::size_t stations,
                            double w_slowest, double agg_cap);

/// One step of the per-station aggregation recursion under a constant
/// plant/model gain mismatch gamma:
///   z <- clamp(z + k1 (target - clamp(gamma z, 1, n_max)), 1, n_max).
std::vector<double> inner_mismatch_step(const std::vector<double>& z, double k1,
                                        const std::vector<double>& target,
                                        double gamma, double n_max);

}  // namespace wlanpace
