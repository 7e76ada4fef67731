// SPDX-License-Identifier: Apache-2.0
#include "wlanpace/pf_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wlanpace/errors.hpp"

namespace wlanpace {

namespace {

constexpr double kBisectTol = 1e-10;
constexpr double kIterTol = 1e-9;
constexpr double kKktTol = 1e-6;

// Delay reached when the anchor station sits at level nu and every other
// station at min{nu W_i, cap}.
double capped_delay(double nu, const WlanModelConfig& cfg, const WeightVector& wv,
                    double cap) {
  double d = cfg.overhead_s;
  for (std::size_t i = 0; i < cfg.stations; ++i)
    d += cfg.tx_time_s[i] * std::min(nu * wv.ratio[i], cap);
  return d;
}

AggregationVector capped_levels(double nu, const WeightVector& wv, double cap) {
  AggregationVector n;
  n.ppf.resize(wv.ratio.size());
  for (std::size_t i = 0; i < n.size(); ++i)
    n.ppf[i] = std::min(nu * wv.ratio[i], cap);
  return n;
}

}  // namespace

void QosTargets::validate(const WlanModelConfig& cfg) const {
  if (!(delay_target_s > 0.0))
    throw ConfigError("targets.delay_target_s must be > 0");
  if (!(agg_cap >= 1.0)) throw ConfigError("targets.agg_cap must be >= 1");
  if (!(agg_cap < cfg.max_frame_packets))
    throw ConfigError("targets.agg_cap must be below model.max_frame_packets");
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::interior: return "interior";
    case Regime::cap_bound: return "cap_bound";
    case Regime::delay_infeasible: return "delay_infeasible";
  }
  return "unknown";
}

WeightVector aggregation_weights(const std::vector<double>& tx_time_s) {
  WeightVector wv;
  const std::size_t n = tx_time_s.size();
  wv.order.resize(n);
  std::iota(wv.order.begin(), wv.order.end(), std::size_t{0});
  std::stable_sort(wv.order.begin(), wv.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return tx_time_s[a] > tx_time_s[b];
                   });
  const double w_max = tx_time_s[wv.order.front()];
  wv.ratio.resize(n);
  for (std::size_t i = 0; i < n; ++i) wv.ratio[i] = w_max / tx_time_s[i];
  return wv;
}

PfSolution solve_fixed_point(const WlanModelConfig& cfg, const QosTargets& q) {
  cfg.validate();
  q.validate(cfg);
  const WeightVector wv = aggregation_weights(cfg.tx_time_s);

  PfSolution sol;
  const double cap = q.agg_cap;
  if (capped_delay(1.0, cfg, wv, cap) > q.delay_target_s) {
    sol.nu = 1.0;
    sol.regime = Regime::delay_infeasible;
  } else if (capped_delay(cap, cfg, wv, cap) <= q.delay_target_s) {
    sol.nu = cap;
    sol.regime = Regime::cap_bound;
  } else {
    double lo = 1.0, hi = cap;
    for (int it = 0; it < 200 && hi - lo > kBisectTol; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;  // interval at double resolution
      if (capped_delay(mid, cfg, wv, cap) > q.delay_target_s)
        hi = mid;
      else
        lo = mid;
    }
    sol.nu = 0.5 * (lo + hi);
    sol.regime = Regime::interior;
  }
  sol.agg = capped_levels(sol.nu, wv, cap);
  sol.rates = inverse_aggregation_map(sol.agg, cfg);
  return sol;
}

OfflineResult solve_offline_iteration(const WlanModelConfig& cfg, const QosTargets& q,
                                      double k1, double k2,
                                      const std::vector<double>& z0, double nu0,
                                      std::size_t max_slots) {
  cfg.validate();
  q.validate(cfg);
  if (!(k1 > 0.0)) throw ConfigError("offline iteration requires k1 > 0");
  if (!(k2 > 0.0 && k2 < 1.0))
    throw ConfigError("offline iteration requires 0 < k2 < 1");
  if (z0.size() != cfg.stations)
    throw DimensionMismatchError("z0 length must equal station count");
  for (double z : z0)
    if (z < 1.0 || z > cfg.max_frame_packets)
      throw ConfigError("z0 entries must lie in [1, max_frame_packets]");
  if (nu0 < 1.0 || nu0 > q.agg_cap)
    throw ConfigError("nu0 must lie in [1, agg_cap]");

  const WeightVector wv = aggregation_weights(cfg.tx_time_s);
  OfflineResult out;
  std::vector<double> z = z0;
  double nu = nu0;

  for (std::size_t k = 0; k < max_slots; ++k) {
    AggregationVector zn;
    zn.ppf = z;
    RateVector x = inverse_aggregation_map(zn, cfg);
    out.trajectory.push_back({z, nu, x});

    const AggregationVector target = capped_levels(nu, wv, q.agg_cap);
    double dz_max = 0.0;
    std::vector<double> z_next(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      z_next[i] = z[i] + k1 * (target.ppf[i] - z[i]);
      dz_max = std::max(dz_max, std::abs(z_next[i] - z[i]));
    }
    const double x_anchor = x.pps[wv.anchor()];
    const double setpoint = std::min(q.delay_target_s * x_anchor, q.agg_cap);
    double nu_next = nu - k2 * (nu - setpoint);
    nu_next = std::max(nu_next, 1.0);
    const double dnu = std::abs(nu_next - nu);

    z = std::move(z_next);
    nu = nu_next;

    if (dz_max < kIterTol && dnu < kIterTol) {
      out.slots_used = k + 1;
      AggregationVector zf;
      zf.ppf = z;
      out.solution.agg = zf;
      out.solution.rates = inverse_aggregation_map(zf, cfg);
      out.solution.nu = nu;
      const PfSolution closed = solve_fixed_point(cfg, q);
      out.solution.regime = closed.regime;
      return out;
    }
  }
  std::ostringstream os;
  os << "offline iteration did not converge in " << max_slots << " slots";
  throw IterationDivergedError(os.str(), std::move(out.trajectory));
}

KktCertificate verify_kkt(const PfSolution& sol, const WlanModelConfig& cfg,
                          const QosTargets& q) {
  cfg.validate();
  q.validate(cfg);
  const std::size_t n = cfg.stations;
  if (sol.rates.size() != n)
    throw DimensionMismatchError("solution size does not match model");

  const double wx = airtime(sol.rates, cfg);
  const double delay_slack = (1.0 - cfg.overhead_s / q.delay_target_s) - wx;
  if (delay_slack < -kKktTol) {
    std::ostringstream os;
    os << "delay constraint violated: w'x = " << wx << " exceeds 1 - c/T = "
       << 1.0 - cfg.overhead_s / q.delay_target_s;
    throw FeasibilityError(os.str());
  }
  std::vector<double> cap_slack(n);
  for (std::size_t i = 0; i < n; ++i) {
    cap_slack[i] =
        q.agg_cap - (cfg.overhead_s * sol.rates.pps[i] + q.agg_cap * wx);
    if (cap_slack[i] < -kKktTol * q.agg_cap) {
      std::ostringstream os;
      os << "aggregation cap constraint violated at station " << i
         << ": c x_i + cap w'x = " << q.agg_cap - cap_slack[i]
         << " exceeds cap = " << q.agg_cap;
      throw FeasibilityError(os.str());
    }
  }

  KktCertificate cert;
  cert.lambda.assign(n, 0.0);
  const double active_tol = 1e-7 * q.agg_cap;
  for (std::size_t i = 0; i < n; ++i)
    if (cap_slack[i] > active_tol) cert.slack_stations.push_back(i);

  if (!cert.slack_stations.empty()) {
    // Slack stations pin D through 1/x_i = D w_i, then the active
    // stations' multipliers follow from stationarity.
    double d_sum = 0.0;
    for (std::size_t i : cert.slack_stations)
      d_sum += 1.0 / (sol.rates.pps[i] * cfg.tx_time_s[i]);
    cert.d_value = d_sum / static_cast<double>(cert.slack_stations.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (cap_slack[i] > active_tol) continue;
      cert.lambda[i] = (1.0 / sol.rates.pps[i] - cert.d_value * cfg.tx_time_s[i]) /
                       cfg.overhead_s;
    }
    const double lambda_sum =
        std::accumulate(cert.lambda.begin(), cert.lambda.end(), 0.0);
    cert.theta = cert.d_value - q.agg_cap * lambda_sum;
  } else {
    // Every cap constraint active. Take the theta = 0 branch and solve the
    // resulting linear system for lambda in closed form.
    cert.theta = 0.0;
    double inv_sum = 0.0, w_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      inv_sum += 1.0 / sol.rates.pps[i];
      w_sum += cfg.tx_time_s[i];
    }
    const double lambda_sum = inv_sum / (cfg.overhead_s + q.agg_cap * w_sum);
    cert.d_value = q.agg_cap * lambda_sum;
    for (std::size_t i = 0; i < n; ++i)
      cert.lambda[i] = (1.0 / sol.rates.pps[i] - cert.d_value * cfg.tx_time_s[i]) /
                       cfg.overhead_s;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double grad = cert.lambda[i] * cfg.overhead_s + cert.d_value * cfg.tx_time_s[i];
    cert.stationarity_residual =
        std::max(cert.stationarity_residual, std::abs(1.0 - sol.rates.pps[i] * grad));
    cert.slackness_residual = std::max(
        cert.slackness_residual, std::abs(cert.lambda[i] * cap_slack[i]) / q.agg_cap);
    cert.dual_residual = std::max(cert.dual_residual, -cert.lambda[i]);
  }
  cert.slackness_residual =
      std::max(cert.slackness_residual, std::abs(cert.theta * delay_slack));
  cert.dual_residual = std::max(cert.dual_residual, -cert.theta);
  cert.dual_residual = std::max(cert.dual_residual, 0.0);

  cert.accepted = cert.stationarity_residual < kKktTol &&
                  cert.slackness_residual < kKktTol && cert.dual_residual < kKktTol;
  return cert;
}

namespace {

bool oracle_feasible(const std::vector<double>& x, const WlanModelConfig& cfg,
                     const QosTargets& q) {
  double wx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) wx += cfg.tx_time_s[i] * x[i];
  if (wx > 1.0 - cfg.overhead_s / q.delay_target_s + 1e-15) return false;
  for (double xi : x)
    if (cfg.overhead_s * xi + q.agg_cap * wx > q.agg_cap * (1.0 + 1e-12))
      return false;
  return true;
}

}  // namespace

RateVector brute_force_oracle(const WlanModelConfig& cfg, const QosTargets& q,
                              std::size_t grid_resolution) {
  cfg.validate();
  q.validate(cfg);
  const std::size_t n = cfg.stations;
  if (n > 3)
    throw UnsupportedSizeError("brute_force_oracle supports at most 3 stations");
  if (grid_resolution < 8) grid_resolution = 8;

  // Per-axis bounding box from the two constraint families.
  std::vector<double> lo(n, 1e-9), hi(n);
  for (std::size_t i = 0; i < n; ++i)
    hi[i] = std::min((1.0 - cfg.overhead_s / q.delay_target_s) / cfg.tx_time_s[i],
                     q.agg_cap / cfg.overhead_s);

  const std::size_t res = grid_resolution;
  const int levels = 9;
  std::vector<double> best_x(n, 0.0);
  double best_obj = -std::numeric_limits<double>::infinity();

  std::vector<std::size_t> idx(n, 0);
  std::vector<double> point(n, 0.0);
  for (int level = 0; level < levels; ++level) {
    std::fill(idx.begin(), idx.end(), 0);
    bool done = false;
    while (!done) {
      for (std::size_t d = 0; d < n; ++d)
        point[d] = lo[d] + (hi[d] - lo[d]) * static_cast<double>(idx[d]) /
                               static_cast<double>(res - 1);
      if (oracle_feasible(point, cfg, q) && *std::min_element(point.begin(), point.end()) > 0.0) {
        double obj = 0.0;
        for (double v : point) obj += std::log(v);
        if (obj > best_obj) {
          best_obj = obj;
          best_x = point;
        }
      }
      // odometer increment over the n-dimensional grid
      std::size_t d = 0;
      while (d < n && ++idx[d] == res) {
        idx[d] = 0;
        ++d;
      }
      done = d == n;
    }
    if (!std::isfinite(best_obj))
      throw FeasibilityError("oracle found no feasible grid point");
    for (std::size_t d = 0; d < n; ++d) {
      const double span = (hi[d] - lo[d]) * 2.5 / static_cast<double>(res - 1);
      lo[d] = std::max(1e-12, best_x[d] - span);
      hi[d] = best_x[d] + span;
    }
  }
  RateVector out;
  out.pps = best_x;
  return out;
}

RateVector equal_airtime_solution(const WlanModelConfig& cfg) {
  cfg.validate();
  RateVector x;
  x.pps.resize(cfg.stations);
  const double share = 1.0 / static_cast<double>(cfg.stations);
  for (std::size_t i = 0; i < cfg.stations; ++i)
    x.pps[i] = share / cfg.tx_time_s[i];
  return x;
}

double pf_objective(const RateVector& x) {
  double obj = 0.0;
  for (double v : x.pps) obj += std::log(v);
  return obj;
}

}  // namespace wlanpace
