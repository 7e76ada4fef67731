// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one check per release criterion, one PASS/FAIL line
// each. Exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "support/test_helpers.hpp"
#include "wlanpace/controller.hpp"
#include "wlanpace/pf_solver.hpp"
#include "wlanpace/plant_sim.hpp"
#include "wlanpace/scenario.hpp"

using namespace wlanpace;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// ---------------------------------------------------------------- C1
Outcome c1_model_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  double worst_round = 0.0, worst_delay = 0.0;
  const int total = 10000;
  for (int trial = 0; trial < total; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial) % 25;
    WlanModelConfig cfg;
    cfg.stations = n;
    cfg.overhead_s = test::uniform(rng, 1e-4, 3e-3);
    AggregationVector agg;
    for (std::size_t i = 0; i < n; ++i) {
      cfg.tx_time_s.push_back(test::uniform(rng, 1e-5, 3e-4));
      agg.ppf.push_back(test::uniform(rng, 1.0, 64.0));
    }
    const auto x = inverse_aggregation_map(agg, cfg);
    const auto back = aggregation_map(x, cfg);
    for (std::size_t i = 0; i < n; ++i)
      worst_round = std::max(worst_round, rel_err(back.raw.ppf[i], agg.ppf[i]));
    const double via_agg = delay_from_aggregation(agg, cfg);
    const double via_rates = cfg.overhead_s / (1.0 - airtime(x, cfg));
    worst_delay = std::max(worst_delay, rel_err(via_agg, via_rates));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  o.pass = worst_round <= 1e-12 && worst_delay <= 1e-12 && secs < 1.0;
  std::ostringstream d;
  d << "worst round-trip rel err " << worst_round << ", worst delay-identity rel err "
    << worst_delay << ", " << total << " vectors in " << secs << " s";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- C2
Outcome c2_delay_arithmetic() {
  const auto mcs2 = test::single_station(2);
  const double d16 = delay_from_aggregation(AggregationVector{{16.0}}, mcs2);
  const auto mcs9 = test::single_station(9);
  const double wn48 = 48.0 * mcs9.tx_time_s[0];
  const double d48 = delay_from_aggregation(AggregationVector{{48.0}}, mcs9);
  Outcome o;
  o.pass = std::abs(d16 - 2.46e-3) <= 0.05e-3 && std::abs(wn48 - 1.52e-3) <= 0.02e-3 &&
           std::abs(d48 - 1.72e-3) <= 0.02e-3;
  std::ostringstream d;
  d << "MCS2 N=16 delay " << d16 * 1e3 << " ms (want 2.46 +/- 0.05), MCS9 w'N "
    << wn48 * 1e3 << " ms (want 1.52 +/- 0.02), total " << d48 * 1e3
    << " ms (want 1.72 +/- 0.02)";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- C3
Outcome c3_solver_regimes() {
  const auto s2 = solve_fixed_point(test::single_station(2), test::targets());
  const auto s9 = solve_fixed_point(test::single_station(9), test::targets());
  Outcome o;
  o.pass = s2.regime == Regime::interior && s2.nu >= 16.0 && s2.nu <= 16.6 &&
           s9.regime == Regime::cap_bound && s9.nu == 48.0;
  std::ostringstream d;
  d << "MCS2 nu* = " << s2.nu << " (" << to_string(s2.regime)
    << ", want [16.0, 16.6]), MCS9 nu* = " << s9.nu << " ("
    << to_string(s9.regime) << ", want cap_bound at 48)";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- C4
Outcome c4_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2024);
  int accepted = 0, drawn = 0;
  double worst_obj = 0.0, worst_alloc = 0.0;
  while (accepted < 50 && drawn < 4000) {
    ++drawn;
    const std::size_t n = 1 + rng.next_u64() % 3;
    WlanModelConfig cfg;
    cfg.stations = n;
    cfg.overhead_s =
        static_cast<double>(n) * test::uniform(rng, 1e-4, 4e-4);
    const bool equal_w = accepted % 5 == 4;  // sprinkle cap-limited cases in
    const double w_common = test::uniform(rng, 2e-5, 4.5e-4);
    for (std::size_t i = 0; i < n; ++i)
      cfg.tx_time_s.push_back(equal_w ? w_common
                                      : test::uniform(rng, 2e-5, 4.5e-4));
    const double w1 = *std::max_element(cfg.tx_time_s.begin(), cfg.tx_time_s.end());
    QosTargets q;
    q.agg_cap = test::uniform(rng, 8.0, 60.0);
    const double lo = cfg.overhead_s + 1.5 * static_cast<double>(n) * w1;
    const double hi =
        cfg.overhead_s + (equal_w ? 3.0 : 0.9) * q.agg_cap * static_cast<double>(n) * w1;
    q.delay_target_s = test::uniform(rng, lo, hi);

    PfSolution sol;
    KktCertificate cert;
    try {
      sol = solve_fixed_point(cfg, q);
      cert = verify_kkt(sol, cfg, q);
    } catch (const Error&) {
      continue;
    }
    // Compare only where the delay-filling policy is provably optimal for
    // the underlying allocation problem: certificate-verified points.
    if (!cert.accepted) continue;
    ++accepted;

    const auto bf = brute_force_oracle(cfg, q);
    worst_obj = std::max(worst_obj,
                         std::abs(pf_objective(sol.rates) - pf_objective(bf)));
    for (std::size_t i = 0; i < n; ++i)
      worst_alloc = std::max(worst_alloc, rel_err(bf.pps[i], sol.rates.pps[i]));
    if (pf_objective(sol.rates) < pf_objective(bf) - 1e-6) {
      Outcome o;
      o.detail = "solver objective fell below the oracle";
      return o;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  o.pass = accepted == 50 && worst_obj <= 1e-6 && worst_alloc <= 1e-4 && secs < 60.0;
  std::ostringstream d;
  d << accepted << "/50 certificate-verified instances (" << drawn
    << " drawn), worst |objective gap| " << worst_obj << ", worst allocation rel err "
    << worst_alloc << ", " << secs << " s";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- C5
Outcome c5_separated_convergence() {
  Outcome o;
  std::ostringstream d;
  bool ok = true;

  struct Interior {
    std::size_t n;
    double c, w1, t_bar;
  };
  const double w_mcs2 = mcs_to_w(2, 1);
  std::vector<Interior> interiors = {
      {1, 2e-4, w_mcs2, 2.5e-3},
      {3, 6e-4, w_mcs2, 6e-4 + 8.0 * 3.0 * w_mcs2},
  };
  for (const auto& in : interiors) {
    const double nu_star = (in.t_bar - in.c) / (static_cast<double>(in.n) * in.w1);
    for (double k2 : {0.05, 0.2, 0.9}) {
      double nu = 1.0;
      bool lyapunov_ok = true, converged = false;
      int slot = 0;
      for (; slot < 2000; ++slot) {
        const double v = (nu - nu_star) * (nu - nu_star);
        if (std::abs(nu - nu_star) <= 1e-6) {
          converged = true;
          break;
        }
        nu = separated_outer_step(nu, k2, in.t_bar, in.c, in.n, in.w1, 48.0);
        const double v_next = (nu - nu_star) * (nu - nu_star);
        if (v_next >= v) lyapunov_ok = false;
      }
      if (!(converged && lyapunov_ok)) {
        ok = false;
        d << "[interior n=" << in.n << " k2=" << k2 << " failed at slot " << slot
          << " nu=" << nu << "] ";
      }
    }
  }

  // cap-limited: budget beyond the cap, nu must climb to the cap
  {
    const double w9 = mcs_to_w(9, 1);
    for (double k2 : {0.05, 0.2, 0.9}) {
      double nu = 1.0;
      for (int k = 0; k < 2000 && std::abs(nu - 48.0) > 1e-6; ++k)
        nu = separated_outer_step(nu, k2, 2.5e-3, 2e-4, 1, w9, 48.0);
      if (std::abs(nu - 48.0) > 1e-6) {
        ok = false;
        d << "[cap regime k2=" << k2 << " stuck at " << nu << "] ";
      }
    }
  }
  // unreachable budget: nu must fall to the floor
  {
    const double t_bar = 2e-4 + 0.5 * w_mcs2;
    for (double k2 : {0.05, 0.2, 0.9}) {
      double nu = 20.0;
      for (int k = 0; k < 2000 && std::abs(nu - 1.0) > 1e-6; ++k)
        nu = separated_outer_step(nu, k2, t_bar, 2e-4, 1, w_mcs2, 48.0);
      if (std::abs(nu - 1.0) > 1e-6) {
        ok = false;
        d << "[floor regime k2=" << k2 << " stuck at " << nu << "] ";
      }
    }
  }
  o.pass = ok;
  if (ok)
    d << "interior limits hit (T-c)/(n w1) for k2 in {0.05, 0.2, 0.9} with "
         "monotone Lyapunov decrease; boundary regimes reach 48 and 1";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- C6
Outcome c6_inner_gain_margin() {
  const std::vector<double> target(1, 32.0);
  const auto run_gamma = [&](double gamma, double z0_offset, int slots) {
    const double z_star = 32.0 / gamma;
    std::vector<double> z = {z_star + z0_offset};
    const double e0 = std::abs(z0_offset);
    double max_ratio = 0.0, final_ratio = 0.0;
    for (int k = 0; k < slots; ++k) {
      z = inner_mismatch_step(z, 0.5, target, gamma, 64.0);
      const double e = std::abs(z[0] - z_star);
      max_ratio = std::max(max_ratio, e / e0);
      final_ratio = e / e0;
    }
    return std::pair{max_ratio, final_ratio};
  };
  const auto [max39, fin39] = run_gamma(3.9, 2.0, 200);
  const auto [max41, fin41] = run_gamma(4.1, 0.1, 200);
  Outcome o;
  o.pass = max39 < 10.0 && fin39 < 1.0 && max41 >= 10.0;
  std::ostringstream d;
  d << "K1=0.5: gamma=3.9 error ratio fell to " << fin39
    << " (max " << max39 << "); gamma=4.1 error grew " << max41
    << "x within 200 slots (12 dB margin: tolerates mismatch up to 4x)";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- C7
namespace outer_boundary {

// Full coupled loop at the inner loop's tolerated mismatch (gamma = 3.9,
// the convergent side of the C6 margin), overhead estimator frozen. The
// matched loop contracts for every k2 < 2, so the boundary is probed where
// robustness is actually spent.
struct Trace {
  bool converged = false;
  int slots = 0;
  double tail_amplitude = 0.0;
};

Trace run_loop(double k2, int max_slots) {
  const double gamma = 3.9, k1 = 0.5, t_bar = 0.05, c_hat = 2e-4, w = 1.2621e-3;
  const double cap = 48.0, n_max = 64.0;
  double z = 1.0, nu = 1.0;
  std::vector<double> nu_tail;
  Trace tr;
  for (int k = 0; k < max_slots; ++k) {
    const double x1 = z / (c_hat + w * z);
    const double measured = std::clamp(gamma * z, 1.0, n_max);
    const double z_next =
        std::clamp(z + k1 * (std::min(nu, cap) - measured), 1.0, n_max);
    const double nu_next =
        std::clamp(nu + k2 * (std::min(t_bar * x1, cap) - nu), 1.0, cap);
    const double dz = std::abs(z_next - z), dnu = std::abs(nu_next - nu);
    z = z_next;
    nu = nu_next;
    if (k >= max_slots - 1000) nu_tail.push_back(nu);
    if (dz < 1e-9 && dnu < 1e-9) {
      tr.converged = true;
      tr.slots = k;
      return tr;
    }
  }
  tr.slots = max_slots;
  const auto [lo, hi] = std::minmax_element(nu_tail.begin(), nu_tail.end());
  tr.tail_amplitude = *hi - *lo;
  return tr;
}

}  // namespace outer_boundary

Outcome c7_outer_gain_boundary() {
  const auto ok99 = outer_boundary::run_loop(0.99, 10000);
  const auto hot = outer_boundary::run_loop(1.5, 10000);
  Outcome o;
  o.pass = ok99.converged && !hot.converged && hot.tail_amplitude > 0.1;
  std::ostringstream d;
  d << "K2=0.99 converged in " << ok99.slots
    << " slots; K2=1.5 did not converge in 10000 slots (sustained nu swing "
    << hot.tail_amplitude << " packets over the final 1000)";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- C8
Outcome c8_estimator_tracking() {
  Outcome o;
  std::ostringstream d;

  const auto family = make_preset("c_track");
  const Scenario& base = family.front();
  const long step_slot = 150;

  // noise free
  const RunResult clean = run(base);
  int clean_slots = -1;
  for (std::size_t k = step_slot; k < clean.series.size(); ++k) {
    if (std::abs(clean.series[k].c_hat_s - 2.2e-3) <= 0.1 * 2.2e-3) {
      clean_slots = static_cast<int>(clean.series[k].slot - step_slot);
      break;
    }
  }

  // sigma = 2, averaged over 10 seeds
  std::vector<double> avg;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Scenario s = base;
    s.plant.noise_sigma = 2.0;
    s.plant.seed = seed;
    const RunResult res = run(s);
    if (avg.empty()) avg.assign(res.series.size(), 0.0);
    for (std::size_t k = 0; k < res.series.size(); ++k)
      avg[k] += res.series[k].c_hat_s / 10.0;
  }
  int noisy_slots = -1;
  for (std::size_t k = step_slot; k < avg.size(); ++k) {
    if (std::abs(avg[k] - 2.2e-3) <= 0.2 * 2.2e-3) {
      noisy_slots = static_cast<int>(k + 1 - step_slot);
      break;
    }
  }

  o.pass = clean_slots >= 0 && clean_slots <= 60 && noisy_slots >= 0 &&
           noisy_slots <= 100;
  d << "200us -> 2200us step: noise-free within 10% after " << clean_slots
    << " slots (<= 60); sigma=2 seed-averaged within 20% after " << noisy_slots
    << " slots (<= 100)";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- C9
Outcome c9_closed_loop_regulation() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::ostringstream d;
  bool ok = true;
  int checked = 0, skipped = 0;
  for (std::size_t n : {std::size_t{1}, std::size_t{10}, std::size_t{25}}) {
    for (double t_bar : {5e-3, 10e-3, 20e-3}) {
      Scenario s;
      s.model = test::multi_station(std::vector<int>(n, 9));
      s.targets = test::targets(t_bar, 48.0);
      s.plant.overhead_s = s.model.overhead_s;
      s.plant.tx_time_s = s.model.tx_time_s;
      s.plant.noise_sigma = 1.0;
      s.plant.seed = 42;
      s.duration_slots = 400;
      const RunResult res = run(s);

      double expected = 0.0;
      if (res.reference.regime == Regime::interior) {
        expected = t_bar;
      } else if (res.reference.regime == Regime::cap_bound) {
        expected = delay_from_aggregation(res.reference.agg, s.model);
      } else {
        ++skipped;
        continue;
      }
      double acc = 0.0;
      std::size_t count = 0;
      for (std::size_t k = res.series.size() / 2; k < res.series.size(); ++k) {
        acc += res.series[k].delay_s;
        ++count;
      }
      const double mean_delay = acc / static_cast<double>(count);
      ++checked;
      if (std::abs(mean_delay - expected) > 0.1 * expected) {
        ok = false;
        d << "[n=" << n << " T=" << t_bar * 1e3 << "ms: delay "
          << mean_delay * 1e3 << "ms vs " << expected * 1e3 << "ms] ";
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.pass = ok && checked == 8 && skipped == 1 && secs < 120.0;
  d << checked << " cells within +/-10% of their regime value, " << skipped
    << " delay-infeasible cell skipped, " << secs << " s";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- C10
Outcome c10_equal_airtime_limit() {
  auto cfg = test::multi_station({2, 4, 9});
  cfg.max_frame_packets = 1e12;
  QosTargets q;
  q.delay_target_s = 1e6;
  q.agg_cap = 1e11;
  const auto sol = solve_fixed_point(cfg, q);
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < cfg.stations; ++i) {
    const double a = cfg.tx_time_s[i] * sol.rates.pps[i];
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  const double spread = hi / lo - 1.0;
  Outcome o;
  o.pass = spread < 1e-6;
  std::ostringstream d;
  d << "mixed-MCS n=3 at T=1e6 s: airtime spread " << spread << " (< 1e-6)";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- C11
Outcome c11_determinism() {
  const Scenario s = make_preset("delay_reg").front();
  const std::string a = to_csv(run(s));
  const std::string b = to_csv(run(s));

  const auto dir = std::filesystem::temp_directory_path() / "wlanpace_accept";
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "a.csv", a);
  write_file_atomic(dir / "b.csv", b);
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
  };
  const bool files_equal = slurp(dir / "a.csv") == slurp(dir / "b.csv");
  std::filesystem::remove_all(dir);

  Outcome o;
  o.pass = a == b && files_equal && !a.empty();
  std::ostringstream d;
  d << "two seeded runs of " << s.name << ": " << a.size()
    << " CSV bytes, identical in memory and on disk";
  o.detail = d.str();
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "model identities (round trip + delay form)", c1_model_identities},
      {2, "delay arithmetic at the documented operating points", c2_delay_arithmetic},
      {3, "solver regimes (budget-limited vs cap-limited)", c3_solver_regimes},
      {4, "oracle equivalence on random instances", c4_oracle_equivalence},
      {5, "separated delay-loop convergence (all regimes)", c5_separated_convergence},
      {6, "aggregation-loop gain margin at K1 = 0.5", c6_inner_gain_margin},
      {7, "delay-loop gain boundary under mismatch", c7_outer_gain_boundary},
      {8, "overhead estimator tracking", c8_estimator_tracking},
      {9, "closed-loop delay regulation sweep", c9_closed_loop_regulation},
      {10, "equal-airtime limit", c10_equal_airtime_limit},
      {11, "seeded-run determinism", c11_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("[%s] C%-2d %s — %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str());
  }
  if (failures == 0)
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
