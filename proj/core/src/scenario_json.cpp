// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wlanpace/errors.hpp"
#include "wlanpace/scenario.hpp"

namespace wlanpace {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw ConfigError(context.empty() ? what : context + ": " + what);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(key, e.what());
  }
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) fail(key, "missing required field");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(key, e.what());
  }
}

std::vector<double> tx_times_from(const json& j, double packet_bits,
                                  const char* context) {
  if (j.contains("tx_time_s")) return require<std::vector<double>>(j, "tx_time_s");
  if (j.contains("mcs")) {
    std::vector<double> out;
    for (const auto& entry : j.at("mcs")) {
      if (!entry.is_array() || entry.size() != 2)
        fail(context, "mcs entries must be [index, nss] pairs");
      out.push_back(
          mcs_to_w(entry.at(0).get<int>(), entry.at(1).get<int>(), packet_bits));
    }
    return out;
  }
  fail(context, "needs either tx_time_s or mcs");
}

WlanModelConfig model_from(const json& j) {
  WlanModelConfig m;
  m.packet_bits = get_or(j, "packet_bits", kDefaultPacketBits);
  m.tx_time_s = tx_times_from(j, m.packet_bits, "model");
  m.stations = get_or<std::size_t>(j, "stations", m.tx_time_s.size());
  m.overhead_s = require<double>(j, "overhead_s");
  m.max_frame_packets = get_or(j, "max_frame_packets", 64.0);
  return m;
}

DisturbanceEvent disturbance_from(const json& j) {
  DisturbanceEvent ev;
  ev.at_slot = require<long>(j, "at_slot");
  const auto kind = require<std::string>(j, "kind");
  if (kind == "overhead_step") {
    ev.change = OverheadStep{require<double>(j, "overhead_s")};
  } else if (kind == "mcs_change") {
    ev.change = McsChange{require<std::size_t>(j, "station"),
                          require<double>(j, "rate_bps")};
  } else if (kind == "noise_burst") {
    ev.change = NoiseBurst{require<double>(j, "sigma"),
                           require<long>(j, "duration_slots")};
  } else {
    fail("disturbances", "unknown kind: " + kind);
  }
  return ev;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }

  Scenario s;
  s.name = get_or<std::string>(j, "name", "scenario");
  if (!j.contains("model")) fail("", "scenario needs a model section");
  s.model = model_from(j.at("model"));

  if (j.contains("targets")) {
    const auto& t = j.at("targets");
    s.targets.delay_target_s = require<double>(t, "delay_target_s");
    s.targets.agg_cap = require<double>(t, "agg_cap");
  }
  if (j.contains("gains")) {
    const auto& g = j.at("gains");
    s.gains.k1 = get_or(g, "k1", s.gains.k1);
    s.gains.k2 = get_or(g, "k2", s.gains.k2);
    s.gains.beta = get_or(g, "beta", s.gains.beta);
  }
  if (j.contains("controller")) {
    const auto& c = j.at("controller");
    if (c.contains("c_hat0_s")) s.c_hat0_s = require<double>(c, "c_hat0_s");
  }

  // The plant defaults to a matched copy of the model.
  s.plant.overhead_s = s.model.overhead_s;
  s.plant.tx_time_s = s.model.tx_time_s;
  s.plant.max_frame_packets = s.model.max_frame_packets;
  s.plant.packet_bits = s.model.packet_bits;
  if (j.contains("plant")) {
    const auto& p = j.at("plant");
    s.plant.packet_bits = get_or(p, "packet_bits", s.plant.packet_bits);
    if (p.contains("tx_time_s") || p.contains("mcs"))
      s.plant.tx_time_s = tx_times_from(p, s.plant.packet_bits, "plant");
    s.plant.overhead_s = get_or(p, "overhead_s", s.plant.overhead_s);
    s.plant.noise_sigma = get_or(p, "noise_sigma", 0.0);
    s.plant.slot_s = get_or(p, "slot_s", 0.1);
    s.plant.max_frame_packets =
        get_or(p, "max_frame_packets", s.plant.max_frame_packets);
    s.plant.quantize_frames = get_or(p, "quantize_frames", true);
    s.plant.seed = get_or<std::uint64_t>(p, "seed", 1);
    if (p.contains("overhead_schedule"))
      for (const auto& e : p.at("overhead_schedule"))
        s.plant.overhead_schedule.emplace_back(e.at(0).get<long>(),
                                               e.at(1).get<double>());
    if (p.contains("tx_time_schedule"))
      for (const auto& e : p.at("tx_time_schedule"))
        s.plant.tx_time_schedule.emplace_back(
            e.at(0).get<long>(), e.at(1).get<std::vector<double>>());
  }

  if (j.contains("disturbances"))
    for (const auto& e : j.at("disturbances"))
      s.disturbances.push_back(disturbance_from(e));

  s.duration_slots = get_or<long>(j, "duration_slots", 400);
  s.mode = run_mode_from_string(get_or<std::string>(j, "mode", "closed_loop"));
  s.inner_target = get_or(j, "inner_target", 32.0);

  s.validate();
  return s;
}

Scenario scenario_from_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario file: " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  try {
    return scenario_from_json(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["model"] = {{"stations", s.model.stations},
                {"overhead_s", s.model.overhead_s},
                {"tx_time_s", s.model.tx_time_s},
                {"max_frame_packets", s.model.max_frame_packets},
                {"packet_bits", s.model.packet_bits}};
  j["targets"] = {{"delay_target_s", s.targets.delay_target_s},
                  {"agg_cap", s.targets.agg_cap}};
  j["gains"] = {{"k1", s.gains.k1}, {"k2", s.gains.k2}, {"beta", s.gains.beta}};
  if (s.c_hat0_s) j["controller"] = {{"c_hat0_s", *s.c_hat0_s}};
  json p;
  p["overhead_s"] = s.plant.overhead_s;
  p["tx_time_s"] = s.plant.tx_time_s;
  p["noise_sigma"] = s.plant.noise_sigma;
  p["slot_s"] = s.plant.slot_s;
  p["max_frame_packets"] = s.plant.max_frame_packets;
  p["packet_bits"] = s.plant.packet_bits;
  p["quantize_frames"] = s.plant.quantize_frames;
  p["seed"] = s.plant.seed;
  if (!s.plant.overhead_schedule.empty()) {
    json sched = json::array();
    for (const auto& [slot, value] : s.plant.overhead_schedule)
      sched.push_back({slot, value});
    p["overhead_schedule"] = sched;
  }
  if (!s.plant.tx_time_schedule.empty()) {
    json sched = json::array();
    for (const auto& [slot, values] : s.plant.tx_time_schedule)
      sched.push_back({slot, values});
    p["tx_time_schedule"] = sched;
  }
  j["plant"] = p;
  if (!s.disturbances.empty()) {
    json evs = json::array();
    for (const auto& ev : s.disturbances) {
      json e;
      e["at_slot"] = ev.at_slot;
      if (const auto* step = std::get_if<OverheadStep>(&ev.change)) {
        e["kind"] = "overhead_step";
        e["overhead_s"] = step->overhead_s;
      } else if (const auto* mcs = std::get_if<McsChange>(&ev.change)) {
        e["kind"] = "mcs_change";
        e["station"] = mcs->station;
        e["rate_bps"] = mcs->rate_bps;
      } else if (const auto* burst = std::get_if<NoiseBurst>(&ev.change)) {
        e["kind"] = "noise_burst";
        e["sigma"] = burst->sigma;
        e["duration_slots"] = burst->duration_slots;
      }
      evs.push_back(e);
    }
    j["disturbances"] = evs;
  }
  j["duration_slots"] = s.duration_slots;
  j["mode"] = to_string(s.mode);
  j["inner_target"] = s.inner_target;
  return j.dump(2);
}

std::string solution_json(const PfSolution& sol, const KktCertificate& cert,
                          const RateVector* oracle) {
  json j;
  j["x_star_pps"] = sol.rates.pps;
  j["n_star_ppf"] = sol.agg.ppf;
  j["nu_star"] = sol.nu;
  j["regime"] = to_string(sol.regime);
  j["kkt"] = {{"theta", cert.theta},
              {"lambda", cert.lambda},
              {"d_value", cert.d_value},
              {"slack_stations", cert.slack_stations},
              {"stationarity_residual", cert.stationarity_residual},
              {"slackness_residual", cert.slackness_residual},
              {"dual_residual", cert.dual_residual},
              {"accepted", cert.accepted}};
  if (oracle) {
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.rates.size(); ++i)
      worst = std::max(worst, std::abs(oracle->pps[i] - sol.rates.pps[i]) /
                                  std::max(sol.rates.pps[i], 1e-300));
    j["oracle"] = {{"x_pps", oracle->pps},
                   {"max_rate_rel_diff", worst},
                   {"agrees", worst < 1e-3}};
  }
  return j.dump(2);
}

}  // namespace wlanpace
