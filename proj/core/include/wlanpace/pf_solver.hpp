// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wlanpace/errors.hpp"
#include "wlanpace/model.hpp"

namespace wlanpace {

/// QoS envelope for the rate allocation: delay budget and aggregation cap.
struct QosTargets {
  double delay_target_s = 2.5e-3;  // T-bar
  double agg_cap = 48.0;           // N-bar, must stay below max_frame_packets

  void validate(const WlanModelConfig& cfg) const;
};

/// Which constraint binds at the accepted allocation.
enum class Regime {
  interior,          // delay budget met with equality, cap not forced
  cap_bound,         // aggregation cap reached before the delay budget
  delay_infeasible,  // budget unreachable even at minimum aggregation
};

std::string to_string(Regime r);

/// Aggregation weights W_i = w_max / w_i together with the station order
/// sorted by descending transmit time. order[0] ("station 1") is the slowest
/// station, ties broken by lowest index; its weight is exactly 1 and every
/// other weight is >= 1.
struct WeightVector {
  std::vector<double> ratio;        // indexed by original station id
  std::vector<std::size_t> order;   // station ids, slowest first

  std::size_t anchor() const { return order.front(); }
};

WeightVector aggregation_weights(const std::vector<double>& tx_time_s);

/// Proportional-fair low-delay allocation.
struct PfSolution {
  RateVector rates;        // x*
  AggregationVector agg;   // N* = min{nu* W, cap}
  double nu = 1.0;         // anchor-station aggregation level nu*
  Regime regime = Regime::interior;
};

/// Closed-form solve: bisection on the monotone map
/// nu -> c + w' min{nu W, cap} - delay_target over nu in [1, cap].
PfSolution solve_fixed_point(const WlanModelConfig& cfg, const QosTargets& q);

/// One iterate of the offline gradient recursion.
struct OfflinePoint {
  std::vector<double> z;
  double nu = 1.0;
  RateVector rates;
};

struct OfflineResult {
  std::vector<OfflinePoint> trajectory;
  PfSolution solution;
  std::size_t slots_used = 0;
};

/// Offline gradient iteration:
///   z  <- z + k1 (min{nu W, cap} - z)
///   nu <- max(nu - k2 (nu - min{T x_anchor, cap}), 1)
///   x  =  inverse_aggregation_map(z)
/// Stops when both updates move less than 1e-9, or throws
/// IterationDivergedError (carrying the trajectory) after max_slots.
OfflineResult solve_offline_iteration(const WlanModelConfig& cfg, const QosTargets& q,
                                      double k1, double k2,
                                      const std::vector<double>& z0, double nu0,
                                      std::size_t max_slots);

/// Thrown when the offline iteration fails to settle within its budget.
class IterationDivergedError : public Error {
 public:
  IterationDivergedError(const std::string& what, std::vector<OfflinePoint> trajectory)
      : Error(what), trajectory_(std::move(trajectory)) {}
  const std::vector<OfflinePoint>& trajectory() const { return trajectory_; }

 private:
  std::vector<OfflinePoint> trajectory_;
};

/// KKT multipliers recovered from a candidate allocation, plus the residuals
/// that certify (or refute) optimality.
struct KktCertificate {
  double theta = 0.0;                       // delay-constraint multiplier
  std::vector<double> lambda;               // per-station cap multipliers
  double d_value = 0.0;                     // D = cap * sum(lambda) + theta
  std::vector<std::size_t> slack_stations;  // stations with aggregation < cap
  double stationarity_residual = 0.0;       // max_i |1 - x_i (lambda_i c + D w_i)|
  double slackness_residual = 0.0;          // max complementary-slackness product
  double dual_residual = 0.0;               // max(0, -theta, -lambda_i)
  bool accepted = false;                    // all residuals below 1e-6
};

/// Recovers (theta, lambda) from stationarity with lambda zeroed on slack cap
/// constraints, then reports the residuals. Throws FeasibilityError naming
/// the violated constraint when the candidate is not feasible.
KktCertificate verify_kkt(const PfSolution& sol, const WlanModelConfig& cfg,
                          const QosTargets& q);

/// Independent check: maximise sum(log x_i) over the linearised constraints
/// by multi-level grid refinement. Deterministic for a fixed resolution.
/// Supports up to 3 stations; throws UnsupportedSizeError above that.
RateVector brute_force_oracle(const WlanModelConfig& cfg, const QosTargets& q,
                              std::size_t grid_resolution = 48);

/// Allocation with identical per-station airtime w_i x_i at the w'x -> 1
/// capacity limit, i.e. x_i = 1 / (n w_i). This is the limit the solver
/// approaches when both the delay budget and the cap are effectively
/// unconstrained.
RateVector equal_airtime_solution(const WlanModelConfig& cfg);

/// sum(log x_i), the proportional-fairness objective.
double pf_objective(const RateVector& x);

}  // namespace wlanpace
