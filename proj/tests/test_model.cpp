// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "support/test_helpers.hpp"
#include "wlanpace/errors.hpp"
#include "wlanpace/model.hpp"
#include "wlanpace/rng.hpp"

using namespace wlanpace;
using doctest::Approx;

TEST_CASE("aggregation map at 390 Mbps, 10k pkt/s") {
  const auto cfg = test::single_station(9);
  const RateVector x{{1e4}};
  const auto res = aggregation_map(x, cfg);
  // Frozen from direct evaluation of c*x/(1 - w*x).
  CHECK(res.raw.ppf[0] == Approx(2.9305680793507665).epsilon(1e-12));
  CHECK(res.raw.ppf[0] == Approx(2.9306).epsilon(1e-4));
  CHECK(res.projected.ppf[0] == Approx(res.raw.ppf[0]));
}

TEST_CASE("aggregation map zero rate projects to one packet") {
  const auto cfg = test::single_station(9);
  const auto res = aggregation_map(RateVector{{0.0}}, cfg);
  CHECK(res.raw.ppf[0] == 0.0);
  CHECK(res.projected.ppf[0] == 1.0);
}

TEST_CASE("aggregation map rejects infeasible rates") {
  const auto cfg = test::single_station(9);
  const double x_sat = 1.05 / cfg.tx_time_s[0];  // w*x = 1.05
  CHECK(!feasible(RateVector{{x_sat}}, cfg));
  CHECK_THROWS_AS(aggregation_map(RateVector{{x_sat}}, cfg), InfeasibleRateError);
  try {
    aggregation_map(RateVector{{x_sat}}, cfg);
  } catch (const InfeasibleRateError& e) {
    CHECK(e.airtime() == Approx(1.05));
  }
}

TEST_CASE("inverse map at aggregation 48") {
  const auto cfg = test::single_station(9);
  const auto x = inverse_aggregation_map(AggregationVector{{48.0}}, cfg);
  // Frozen from N / (c + w N); ~334 Mbps of 1500 B payloads.
  CHECK(x.pps[0] == Approx(27839.246198872155).epsilon(1e-12));
  CHECK(x.pps[0] == Approx(27840.3).epsilon(1e-4));
  CHECK(x.pps[0] * 12000.0 / 1e6 == Approx(334.07).epsilon(1e-3));
}

TEST_CASE("inverse map zero aggregation gives zero rate") {
  const auto cfg = test::single_station(2);
  const auto x = inverse_aggregation_map(AggregationVector{{0.0}}, cfg);
  CHECK(x.pps[0] == 0.0);
}

TEST_CASE("inverse map range always feasible") {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 8;
    WlanModelConfig cfg;
    cfg.stations = n;
    cfg.overhead_s = test::uniform(rng, 5e-5, 3e-3);
    for (std::size_t i = 0; i < n; ++i)
      cfg.tx_time_s.push_back(test::uniform(rng, 1e-5, 5e-4));
    AggregationVector agg;
    for (std::size_t i = 0; i < n; ++i)
      agg.ppf.push_back(test::uniform(rng, 0.0, 64.0));
    const auto x = inverse_aggregation_map(agg, cfg);
    CHECK(feasible(x, cfg));
    CHECK(airtime(x, cfg) < 1.0);
  }
}

TEST_CASE("round-trip of the aggregation map") {
  Rng rng(202);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 8;
    WlanModelConfig cfg;
    cfg.stations = n;
    cfg.overhead_s = test::uniform(rng, 5e-5, 3e-3);
    AggregationVector agg;
    for (std::size_t i = 0; i < n; ++i) {
      cfg.tx_time_s.push_back(test::uniform(rng, 1e-5, 5e-4));
      agg.ppf.push_back(test::uniform(rng, 1.0, 64.0));
    }
    const auto x = inverse_aggregation_map(agg, cfg);
    const auto back = aggregation_map(x, cfg);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(back.raw.ppf[i] == Approx(agg.ppf[i]).epsilon(1e-12));
  }
}

TEST_CASE("aggregation map round-trips a projected fixed point") {
  const auto cfg = test::single_station(2);
  const auto x = inverse_aggregation_map(AggregationVector{{16.0}}, cfg);
  const auto res = aggregation_map(x, cfg);
  CHECK(res.projected.ppf[0] == Approx(16.0).epsilon(1e-12));
}

TEST_CASE("aggregation map is monotone in every coordinate") {
  Rng rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 4;
    WlanModelConfig cfg;
    cfg.stations = n;
    cfg.overhead_s = test::uniform(rng, 1e-4, 1e-3);
    AggregationVector agg;
    for (std::size_t i = 0; i < n; ++i) {
      cfg.tx_time_s.push_back(test::uniform(rng, 1e-5, 3e-4));
      agg.ppf.push_back(test::uniform(rng, 1.0, 32.0));
    }
    RateVector x = inverse_aggregation_map(agg, cfg);
    RateVector bumped = x;
    for (std::size_t i = 0; i < n; ++i)
      bumped.pps[i] += test::uniform(rng, 0.0, 0.02) * x.pps[i];
    if (!feasible(bumped, cfg)) continue;
    const auto before = aggregation_map(x, cfg);
    const auto after = aggregation_map(bumped, cfg);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(after.raw.ppf[i] >= before.raw.ppf[i] - 1e-12);
  }
}

TEST_CASE("mean delay hits the documented operating points") {
  SUBCASE("87.7 Mbps, aggregation 16") {
    const auto cfg = test::single_station(2);
    const auto x = inverse_aggregation_map(AggregationVector{{16.0}}, cfg);
    const auto d = mean_delay(x, cfg);
    CHECK(d[0] == Approx(2.459338654503991e-3).epsilon(1e-12));
    CHECK(d[0] == Approx(2.46e-3).epsilon(2e-3));  // rounds to 2.5 ms
  }
  SUBCASE("390 Mbps, aggregation 48") {
    const auto cfg = test::single_station(9);
    const auto x = inverse_aggregation_map(AggregationVector{{48.0}}, cfg);
    const auto d = mean_delay(x, cfg);
    CHECK(d[0] == Approx(1.7241846153846154e-3).epsilon(1e-12));
  }
}

TEST_CASE("mean delay falls back to the inter-packet bound at tiny rates") {
  const auto cfg = test::single_station(9);
  const auto d = mean_delay(RateVector{{1.0}}, cfg);
  CHECK(d[0] == Approx(1.0));  // 1/x dominates c/(1-w'x)
}

TEST_CASE("mean delay error paths") {
  const auto cfg = test::single_station(9);
  CHECK_THROWS_AS(mean_delay(RateVector{{0.0}}, cfg), UndefinedDelayError);
  const double x_sat = 1.2 / cfg.tx_time_s[0];
  CHECK_THROWS_AS(mean_delay(RateVector{{x_sat}}, cfg), InfeasibleRateError);
}

TEST_CASE("delay from aggregation") {
  const auto cfg = test::single_station(2);
  CHECK(delay_from_aggregation(AggregationVector{{16.0}}, cfg) ==
        Approx(2.459338654503991e-3).epsilon(1e-12));
  WlanModelConfig three = test::multi_station({2, 4, 9});
  CHECK(delay_from_aggregation(AggregationVector{{0.0, 0.0, 0.0}}, three) ==
        Approx(three.overhead_s));
}

TEST_CASE("delay identity between the two formulations") {
  Rng rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 6;
    WlanModelConfig cfg;
    cfg.stations = n;
    cfg.overhead_s = test::uniform(rng, 1e-4, 2e-3);
    AggregationVector agg;
    for (std::size_t i = 0; i < n; ++i) {
      cfg.tx_time_s.push_back(test::uniform(rng, 1e-5, 4e-4));
      agg.ppf.push_back(test::uniform(rng, 0.5, 64.0));
    }
    const auto x = inverse_aggregation_map(agg, cfg);
    const double via_agg = delay_from_aggregation(agg, cfg);
    const double via_rates = cfg.overhead_s / (1.0 - airtime(x, cfg));
    CHECK(std::abs(via_agg - via_rates) / via_agg < 1e-12);
  }
}

TEST_CASE("feasibility") {
  const auto cfg = test::single_station(9);
  CHECK(feasible(RateVector{{0.0}}, cfg));
  CHECK(!feasible(RateVector{{-1.0}}, cfg));
  CHECK(!feasible(RateVector{{1.05 / cfg.tx_time_s[0]}}, cfg));
  CHECK_THROWS_AS(feasible(RateVector{{1.0, 2.0}}, cfg), DimensionMismatchError);
}

TEST_CASE("VHT80 rate table anchors") {
  CHECK(mcs_to_w(2, 1) == Approx(12384.0 / 87.7e6).epsilon(1e-15));
  CHECK(mcs_to_w(4, 1) == Approx(12384.0 / 175.5e6).epsilon(1e-15));
  CHECK(mcs_to_w(9, 1) == Approx(12384.0 / 390e6).epsilon(1e-15));
  CHECK(mcs_to_w(2, 1) == Approx(1.4122e-4).epsilon(1e-4));
  CHECK(mcs_to_w(4, 1) == Approx(7.0564e-5).epsilon(1e-4));
  CHECK(mcs_to_w(9, 1) == Approx(3.1754e-5).epsilon(1e-4));
  CHECK(vht80_rate_bps(9, 3) == Approx(1170e6));
}

TEST_CASE("VHT80 lookup failures") {
  CHECK_THROWS_AS(vht80_rate_bps(6, 3), McsLookupError);  // excluded combination
  CHECK_THROWS_AS(vht80_rate_bps(10, 1), McsLookupError);
  CHECK_THROWS_AS(vht80_rate_bps(-1, 1), McsLookupError);
  CHECK_THROWS_AS(vht80_rate_bps(0, 4), McsLookupError);
}

TEST_CASE("config validation names the bad field") {
  WlanModelConfig cfg = test::single_station(9);
  cfg.overhead_s = 0.0;
  CHECK_THROWS_WITH_AS(cfg.validate(), "model.overhead_s must be > 0", ConfigError);
  cfg = test::single_station(9);
  cfg.tx_time_s.push_back(1e-5);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
