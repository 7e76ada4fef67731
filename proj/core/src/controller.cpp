// SPDX-License-Identifier: Apache-2.0
#include "wlanpace/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "wlanpace/errors.hpp"

namespace wlanpace {

namespace {

void check_report(const FeedbackReport& report, const ControllerState& state) {
  if (report.measured.size() != state.model.stations ||
      report.phy_rate_bps.size() != state.model.stations) {
    std::ostringstream os;
    os << "feedback report width " << report.measured.size() << "/"
       << report.phy_rate_bps.size() << " does not match " << state.model.stations
       << " stations";
    throw DimensionMismatchError(os.str());
  }
}

}  // namespace

void ControllerGains::validate() const {
  if (!(k1 > 0.0)) throw ConfigError("gains.k1 must be > 0");
  if (!(k2 > 0.0 && k2 < 1.0)) throw ConfigError("gains.k2 must be in (0, 1)");
  if (!(beta > 0.0 && beta <= 1.0))
    throw ConfigError("gains.beta must be in (0, 1]");
}

double default_initial_overhead(std::size_t stations) {
  constexpr double kContentionWindow = 16.0;
  constexpr double kPhySlot = 9e-6;
  return static_cast<double>(stations) * (kContentionWindow / 2.0) * kPhySlot;
}

Controller::Controller(WlanModelConfig model, QosTargets targets,
                       ControllerGains gains,
                       std::optional<double> initial_overhead_s) {
  model.validate();
  targets.validate(model);
  gains.validate();
  const double c0 =
      initial_overhead_s.value_or(default_initial_overhead(model.stations));
  if (!(c0 > 0.0)) throw ConfigError("initial overhead estimate must be > 0");
  state_.model = std::move(model);
  state_.targets = targets;
  state_.gains = gains;
  state_.c_hat = c0;
  state_.model.overhead_s = c0;
  state_.z.assign(state_.model.stations, 1.0);
  state_.nu = 1.0;
  state_.weights = aggregation_weights(state_.model.tx_time_s);
  state_.last_rates = compute_rates();
  state_.slot = 0;
}

RateVector Controller::step(const FeedbackReport& report) {
  check_report(report, state_);
  estimate_c(report);
  refresh_weights(report);
  inner_update(report);
  outer_update();
  state_.last_rates = compute_rates();
  state_.slot = report.slot + 1;
  return state_.last_rates;
}

void Controller::estimate_c(const FeedbackReport& report) {
  check_report(report, state_);
  const std::size_t anchor = state_.weights.anchor();
  const double x_anchor = state_.last_rates.pps[anchor];
  if (x_anchor <= 0.0) return;
  const double wx = airtime(state_.last_rates, state_.model);
  const double c_check = report.measured.ppf[anchor] / x_anchor * (1.0 - wx);
  state_.c_hat =
      (1.0 - state_.gains.beta) * state_.c_hat + state_.gains.beta * c_check;
  state_.model.overhead_s = state_.c_hat;
}

void Controller::refresh_weights(const FeedbackReport& report) {
  check_report(report, state_);
  for (std::size_t i = 0; i < state_.model.stations; ++i) {
    if (!(report.phy_rate_bps[i] > 0.0))
      throw ConfigError("reported PHY rate must be > 0");
    state_.model.tx_time_s[i] = state_.model.packet_bits / report.phy_rate_bps[i];
  }
  state_.weights = aggregation_weights(state_.model.tx_time_s);
}

void Controller::inner_update(const FeedbackReport& report) {
  check_report(report, state_);
  const std::vector<double> target = target_aggregation();
  for (std::size_t i = 0; i < state_.z.size(); ++i) {
    const double err = target[i] - report.measured.ppf[i];
    state_.z[i] = std::clamp(state_.z[i] + state_.gains.k1 * err, 1.0,
                             state_.model.max_frame_packets);
  }
}

void Controller::outer_update() {
  const RateVector x = compute_rates();
  const double x_anchor = x.pps[state_.weights.anchor()];
  const double setpoint =
      std::min(state_.targets.delay_target_s * x_anchor, state_.targets.agg_cap);
  state_.nu = std::clamp(state_.nu + state_.gains.k2 * (setpoint - state_.nu), 1.0,
                         state_.targets.agg_cap);
}

RateVector Controller::compute_rates() const {
  AggregationVector z;
  z.ppf = state_.z;
  return inverse_aggregation_map(z, state_.model);
}

std::vector<double> Controller::target_aggregation() const {
  std::vector<double> target(state_.z.size());
  for (std::size_t i = 0; i < target.size(); ++i)
    target[i] = std::min(state_.nu * state_.weights.ratio[i], state_.targets.agg_cap);
  return target;
}

std::string state_json(const ControllerState& state) {
  nlohmann::json j;
  j["slot"] = state.slot;
  j["z"] = state.z;
  j["nu"] = state.nu;
  j["c_hat"] = state.c_hat;
  j["x"] = state.last_rates.pps;
  std::vector<double> target(state.z.size());
  for (std::size_t i = 0; i < target.size(); ++i)
    target[i] = std::min(state.nu * state.weights.ratio[i], state.targets.agg_cap);
  j["N_target"] = target;
  return j.dump();
}

LoopDiagnostics loop_diagnostics(const ControllerState& state, double c_true) {
  LoopDiagnostics d;
  d.gamma.resize(state.z.size());
  for (std::size_t i = 0; i < state.z.size(); ++i) {
    const double raw = c_true * state.z[i] / state.c_hat;
    d.gamma[i] =
        std::clamp(raw, 1.0, state.model.max_frame_packets) / state.z[i];
  }
  const std::size_t anchor = state.weights.anchor();
  const double w1 = state.model.tx_time_s[anchor];
  const double unconstrained =
      state.targets.delay_target_s * state.nu /
      (state.c_hat + state.nu * static_cast<double>(state.model.stations) * w1);
  d.gamma0 = unconstrained <= state.targets.agg_cap
                 ? 1.0
                 : state.targets.agg_cap / unconstrained;
  return d;
}

double separated_outer_step(double nu, double k2, double delay_target_s,
                            double overhead_s, std::size_t stations,
                            double w_slowest, double agg_cap) {
  const double x_anchor =
      nu / (overhead_s + nu * static_cast<double>(stations) * w_slowest);
  const double setpoint = std::min(delay_target_s * x_anchor, agg_cap);
  return std::clamp(nu - k2 * (nu - setpoint), 1.0, agg_cap);
}

std::vector<double> inner_mismatch_step(const std::vector<double>& z, double k1,
                                        const std::vector<double>& target,
                                        double gamma, double n_max) {
  std::vector<double> next(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double response = std::clamp(gamma * z[i], 1.0, n_max);
    next[i] = std::clamp(z[i] + k1 * (target[i] - response), 1.0, n_max);
  }
  return next;
}

}  // namespace wlanpace
