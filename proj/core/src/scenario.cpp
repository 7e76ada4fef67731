// SPDX-License-Identifier: Apache-2.0
#include "wlanpace/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "wlanpace/errors.hpp"

namespace wlanpace {

namespace {

constexpr double kConvergedFraction = 0.05;
constexpr double kMacOverheadBits = 48.0 * 8.0;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double nearest_rank_percentile(std::vector<double> v, double pct) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double rank = std::ceil(pct / 100.0 * static_cast<double>(v.size()));
  const std::size_t idx =
      std::min(v.size() - 1, static_cast<std::size_t>(std::max(1.0, rank)) - 1);
  return v[idx];
}

// Scalar response tracked by the step metrics: mean measured aggregation in
// inner_only mode, measured delay otherwise.
double response_value(const SlotRecord& rec, RunMode mode) {
  if (mode == RunMode::inner_only) return mean(rec.n_meas);
  return rec.delay_s;
}

RunMetrics compute_metrics(const std::vector<SlotRecord>& series, RunMode mode,
                           double target, double delay_target_s) {
  RunMetrics m;
  if (series.empty()) return m;
  std::vector<double> r(series.size());
  for (std::size_t k = 0; k < series.size(); ++k)
    r[k] = response_value(series[k], mode);

  const std::size_t tail_start = series.size() - std::max<std::size_t>(
      1, series.size() / 5);
  double r_final = 0.0;
  for (std::size_t k = tail_start; k < series.size(); ++k) r_final += r[k];
  r_final /= static_cast<double>(series.size() - tail_start);
  const double r0 = r.front();
  const double step = r_final - r0;

  if (std::abs(step) < 1e-12) {
    m.rise_time_slots = 0.0;
    m.overshoot_fraction = 0.0;
  } else {
    const double lo = r0 + 0.1 * step;
    const double hi = r0 + 0.9 * step;
    std::size_t k_lo = series.size(), k_hi = series.size();
    for (std::size_t k = 0; k < series.size(); ++k) {
      const bool past_lo = step > 0 ? r[k] >= lo : r[k] <= lo;
      const bool past_hi = step > 0 ? r[k] >= hi : r[k] <= hi;
      if (past_lo && k_lo == series.size()) k_lo = k;
      if (past_hi && k_hi == series.size()) {
        k_hi = k;
        break;
      }
    }
    m.rise_time_slots = k_hi >= series.size()
                            ? static_cast<double>(series.size())
                            : static_cast<double>(k_hi - std::min(k_lo, k_hi));
    double extreme = step > 0 ? *std::max_element(r.begin(), r.end())
                              : *std::min_element(r.begin(), r.end());
    m.overshoot_fraction =
        std::max(0.0, (step > 0 ? extreme - r_final : r_final - extreme) /
                          std::abs(step));
  }

  double abs_err = 0.0, sq_delay_err = 0.0;
  for (std::size_t k = tail_start; k < series.size(); ++k) {
    abs_err += std::abs(r[k] - target);
    const double de = series[k].delay_s - delay_target_s;
    sq_delay_err += de * de;
  }
  const double tail_n = static_cast<double>(series.size() - tail_start);
  m.steady_state_error = abs_err / tail_n;
  m.delay_rms_error = std::sqrt(sq_delay_err / tail_n);
  m.converged =
      m.steady_state_error <= kConvergedFraction * std::max(std::abs(target), 1e-12);
  return m;
}

}  // namespace

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::closed_loop: return "closed_loop";
    case RunMode::inner_only: return "inner_only";
    case RunMode::open_loop_solve: return "open_loop_solve";
  }
  return "unknown";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "closed_loop") return RunMode::closed_loop;
  if (s == "inner_only") return RunMode::inner_only;
  if (s == "open_loop_solve") return RunMode::open_loop_solve;
  throw ConfigError("unknown mode: " + s);
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::delay_target: return "t_bar";
    case SweepAxis::stations: return "n";
    case SweepAxis::mcs: return "mcs";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "t_bar") return SweepAxis::delay_target;
  if (s == "n") return SweepAxis::stations;
  if (s == "mcs") return SweepAxis::mcs;
  throw ConfigError("unknown sweep axis: " + s + " (expected t_bar, n or mcs)");
}

void Scenario::validate() const {
  model.validate();
  targets.validate(model);
  gains.validate();
  plant.validate();
  if (plant.tx_time_s.size() != model.stations)
    throw ConfigError("plant station count must match model station count");
  if (duration_slots < 1) throw ConfigError("duration_slots must be >= 1");
  if (c_hat0_s && !(*c_hat0_s > 0.0))
    throw ConfigError("c_hat0_s must be > 0 when given");
  if (!(inner_target >= 1.0))
    throw ConfigError("inner_target must be >= 1");
  for (const auto& ev : disturbances)
    if (ev.at_slot < 1) throw ConfigError("disturbance at_slot must be >= 1");
}

RunResult run(const Scenario& scenario) {
  scenario.validate();
  RunResult out;
  out.reference = solve_fixed_point(scenario.model, scenario.targets);

  Controller controller(scenario.model, scenario.targets, scenario.gains,
                        scenario.c_hat0_s);
  if (scenario.mode == RunMode::inner_only) {
    controller.mutable_state().nu =
        std::min(scenario.inner_target, scenario.targets.agg_cap);
  }
  Plant plant(scenario.plant);

  RateVector x = scenario.mode == RunMode::open_loop_solve
                     ? out.reference.rates
                     : controller.compute_rates();

  out.series.reserve(static_cast<std::size_t>(scenario.duration_slots));
  for (long slot = 1; slot <= scenario.duration_slots; ++slot) {
    for (const auto& ev : scenario.disturbances)
      if (ev.at_slot == slot) plant.apply_disturbance(ev);

    const SlotMeasurement meas = plant.step(x);

    SlotRecord rec;
    rec.slot = slot;
    rec.time_s = static_cast<double>(slot - 1) * scenario.plant.slot_s;
    rec.x_pps = x.pps;
    rec.n_meas = meas.measured.ppf;
    rec.n_target = controller.target_aggregation();
    rec.nu = controller.state().nu;
    rec.c_hat_s = controller.state().c_hat;
    rec.delay_s = meas.delay_s;
    rec.overloaded = meas.overloaded;
    out.series.push_back(std::move(rec));

    FeedbackReport report{meas.measured, meas.phy_rate_bps, slot};
    switch (scenario.mode) {
      case RunMode::closed_loop:
        x = controller.step(report);
        break;
      case RunMode::inner_only:
        // Aggregation loop alone: the delay loop and the overhead estimator
        // stay off and the target is pinned.
        controller.refresh_weights(report);
        controller.mutable_state().nu =
            std::min(scenario.inner_target, scenario.targets.agg_cap);
        controller.inner_update(report);
        x = controller.compute_rates();
        controller.mutable_state().last_rates = x;
        break;
      case RunMode::open_loop_solve:
        break;
    }
  }

  const double target = scenario.mode == RunMode::inner_only
                            ? scenario.inner_target
                            : scenario.targets.delay_target_s;
  out.metrics = compute_metrics(out.series, scenario.mode, target,
                                scenario.targets.delay_target_s);
  return out;
}

std::string to_csv(const RunResult& result) {
  std::ostringstream os;
  const std::size_t n = result.series.empty() ? 0 : result.series.front().x_pps.size();
  os << "slot,time_s";
  for (std::size_t i = 0; i < n; ++i) os << ",x_pps_" << i;
  for (std::size_t i = 0; i < n; ++i) os << ",n_meas_" << i;
  for (std::size_t i = 0; i < n; ++i) os << ",n_target_" << i;
  os << ",nu,c_hat_us,delay_ms,overloaded\n";
  for (const auto& rec : result.series) {
    os << rec.slot << ',' << format_double(rec.time_s);
    for (double v : rec.x_pps) os << ',' << format_double(v);
    for (double v : rec.n_meas) os << ',' << format_double(v);
    for (double v : rec.n_target) os << ',' << format_double(v);
    os << ',' << format_double(rec.nu) << ',' << format_double(rec.c_hat_s * 1e6)
       << ',' << format_double(rec.delay_s * 1e3) << ',' << (rec.overloaded ? 1 : 0)
       << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot open " + tmp.string() + " for writing");
    f << content;
  }
  std::filesystem::rename(tmp, path);
}

Scenario apply_axis(const Scenario& base, SweepAxis axis, double value) {
  Scenario s = base;
  switch (axis) {
    case SweepAxis::delay_target:
      s.targets.delay_target_s = value;
      break;
    case SweepAxis::stations: {
      const auto n = static_cast<std::size_t>(std::lround(value));
      if (n < 1) throw ConfigError("station sweep value must be >= 1");
      // Per-station overhead and station 0's PHY carry over.
      const double model_toh =
          base.model.overhead_s / static_cast<double>(base.model.stations);
      const double plant_toh =
          base.plant.overhead_s / static_cast<double>(base.plant.tx_time_s.size());
      s.model.stations = n;
      s.model.overhead_s = model_toh * static_cast<double>(n);
      s.model.tx_time_s.assign(n, base.model.tx_time_s.front());
      s.plant.overhead_s = plant_toh * static_cast<double>(n);
      s.plant.tx_time_s.assign(n, base.plant.tx_time_s.front());
      break;
    }
    case SweepAxis::mcs: {
      const int mcs = static_cast<int>(std::lround(value));
      const double w_model = mcs_to_w(mcs, 1, base.model.packet_bits);
      const double w_plant = mcs_to_w(mcs, 1, base.plant.packet_bits);
      std::fill(s.model.tx_time_s.begin(), s.model.tx_time_s.end(), w_model);
      std::fill(s.plant.tx_time_s.begin(), s.plant.tx_time_s.end(), w_plant);
      break;
    }
  }
  return s;
}

std::vector<SweepRow> sweep(const Scenario& base, SweepAxis axis,
                            const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep requires at least one value");
  std::vector<std::future<SweepRow>> futures;
  futures.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    futures.push_back(std::async(std::launch::async, [&base, axis, i, &values] {
      Scenario s;
      try {
        s = apply_axis(base, axis, values[i]);
      } catch (const Error& e) {
        throw ConfigError("sweep value " + format_double(values[i]) + ": " +
                          e.what());
      }
      s.plant.seed = base.plant.seed + i;
      RunResult res;
      try {
        res = run(s);
      } catch (const Error& e) {
        throw ConfigError("sweep value " + format_double(values[i]) + ": " +
                          e.what());
      }

      const std::size_t half = res.series.size() / 2;
      std::vector<double> delays, rates;
      const double payload_bits = std::max(0.0, s.plant.packet_bits - kMacOverheadBits);
      for (std::size_t k = half; k < res.series.size(); ++k) {
        delays.push_back(res.series[k].delay_s);
        double pps = 0.0;
        for (double v : res.series[k].x_pps) pps += v;
        rates.push_back(pps * payload_bits / 1e6);
      }
      SweepRow row;
      row.axis_value = values[i];
      row.mean_delay_s = mean(delays);
      row.mean_rate_mbps = mean(rates);
      row.p75_delay_s = nearest_rank_percentile(delays, 75.0);
      row.p75_rate_mbps = nearest_rank_percentile(rates, 75.0);
      row.regime = res.reference.regime;
      return row;
    }));
  }
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (auto& f : futures) rows.push_back(f.get());
  return rows;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "value,mean_delay_ms,mean_rate_mbps,p75_delay_ms,p75_rate_mbps,regime\n";
  for (const auto& r : rows) {
    os << format_double(r.axis_value) << ',' << format_double(r.mean_delay_s * 1e3)
       << ',' << format_double(r.mean_rate_mbps) << ','
       << format_double(r.p75_delay_s * 1e3) << ','
       << format_double(r.p75_rate_mbps) << ',' << to_string(r.regime) << '\n';
  }
  return os.str();
}

}  // namespace wlanpace
