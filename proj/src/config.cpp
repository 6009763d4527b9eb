#include "herring/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace herring {

using nlohmann::json;

const char* to_string(DeliveryModel m) {
  return m == DeliveryModel::kLockstep ? "lockstep" : "random";
}

const char* to_string(FaultStrategy s) {
  return s == FaultStrategy::kSilentCrash ? "silent_crash" : "reverse_local_order";
}

std::optional<FaultEntry> SimConfig::fault_of(ReplicaId r) const {
  for (const auto& e : faults)
    if (e.replica == r) return e;
  return std::nullopt;
}

void SimConfig::validate() const {
  if (n == 0) throw ConfigError("n", "must be positive");
  if (enforce_thresholds) Thresholds::make(n, f, gamma);
  if (wave_len < 2) throw ConfigError("wave_len", "must be at least 2");
  if (max_rounds == 0) throw ConfigError("max_rounds", "must be positive");
  if (delay_min_ms < 0 || delay_max_ms < delay_min_ms)
    throw ConfigError("delivery_model", "need 0 <= delay_min_ms <= delay_max_ms");
  if (parent_wait_ms < 0) throw ConfigError("parent_wait_ms", "must be non-negative");
  std::set<ReplicaId> faulty;
  for (const auto& e : faults) {
    if (e.replica >= n) throw ConfigError("faults", "replica id out of range");
    if (!faulty.insert(e.replica).second) throw ConfigError("faults", "replica listed twice");
  }
  if (faulty.size() > f) throw ConfigError("faults", "more faulty replicas than f");
  for (const auto& d : directives) {
    for (ReplicaId t : d.targets)
      if (t >= n) throw ConfigError("clients", "target replica out of range");
    if (d.round == 0) throw ConfigError("clients", "injection round must be >= 1");
  }
  for (const auto& [r, extra] : outbound_extra_ms) {
    if (r >= n) throw ConfigError("outbound_extra_ms", "replica id out of range");
    if (extra < 0) throw ConfigError("outbound_extra_ms", "must be non-negative");
  }
  if (workload.tx_count > 0 && workload.interval_ms <= 0)
    throw ConfigError("workload", "interval_ms must be positive");
}

namespace {

template <typename T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.contains(it.key())) throw ConfigError(it.key(), "unknown key in " + where);
}

FaultStrategy parse_strategy(const std::string& s) {
  if (s == "silent_crash") return FaultStrategy::kSilentCrash;
  if (s == "reverse_local_order") return FaultStrategy::kReverseLocalOrder;
  throw ConfigError("faults", "unknown strategy '" + s + "'");
}

}  // namespace

SimConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", e.what());
  }
  check_keys(j,
             {"n", "f", "gamma", "wave_len", "seed", "max_rounds", "delivery_model", "delay_min_ms",
              "delay_max_ms", "outbound_extra_ms", "parent_wait_ms", "self_reference",
              "batch_max_entries", "enforce_thresholds", "faults", "clients", "workload"},
             "config");
  SimConfig c;
  if (j.contains("n")) c.n = get_field<std::uint32_t>(j, "n");
  if (j.contains("f")) c.f = get_field<std::uint32_t>(j, "f");
  if (j.contains("gamma")) c.gamma = get_field<double>(j, "gamma");
  if (j.contains("wave_len")) c.wave_len = get_field<std::uint32_t>(j, "wave_len");
  if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("max_rounds")) c.max_rounds = get_field<Round>(j, "max_rounds");
  if (j.contains("delivery_model")) {
    auto m = get_field<std::string>(j, "delivery_model");
    if (m == "lockstep")
      c.delivery_model = DeliveryModel::kLockstep;
    else if (m == "random")
      c.delivery_model = DeliveryModel::kRandom;
    else
      throw ConfigError("delivery_model", "expected 'lockstep' or 'random'");
  }
  if (j.contains("delay_min_ms")) c.delay_min_ms = get_field<SimTime>(j, "delay_min_ms");
  if (j.contains("delay_max_ms")) c.delay_max_ms = get_field<SimTime>(j, "delay_max_ms");
  if (j.contains("parent_wait_ms")) c.parent_wait_ms = get_field<SimTime>(j, "parent_wait_ms");
  if (j.contains("self_reference")) c.self_reference = get_field<bool>(j, "self_reference");
  if (j.contains("batch_max_entries"))
    c.batch_max_entries = get_field<std::size_t>(j, "batch_max_entries");
  if (j.contains("enforce_thresholds"))
    c.enforce_thresholds = get_field<bool>(j, "enforce_thresholds");
  if (j.contains("outbound_extra_ms")) {
    const auto& m = j.at("outbound_extra_ms");
    if (!m.is_object()) throw ConfigError("outbound_extra_ms", "expected an object");
    for (auto it = m.begin(); it != m.end(); ++it) {
      try {
        c.outbound_extra_ms[static_cast<ReplicaId>(std::stoul(it.key()))] = it.value().get<SimTime>();
      } catch (const std::exception& e) {
        throw ConfigError("outbound_extra_ms", e.what());
      }
    }
  }
  if (j.contains("faults")) {
    const auto& arr = j.at("faults");
    if (!arr.is_array()) throw ConfigError("faults", "expected an array");
    for (const auto& e : arr) {
      check_keys(e, {"replica", "strategy", "activation_round"}, "faults");
      FaultEntry fe;
      fe.replica = get_field<ReplicaId>(e, "replica");
      fe.strategy = parse_strategy(get_field<std::string>(e, "strategy"));
      if (e.contains("activation_round")) fe.activation_round = get_field<Round>(e, "activation_round");
      c.faults.push_back(fe);
    }
  }
  if (j.contains("clients")) {
    const auto& arr = j.at("clients");
    if (!arr.is_array()) throw ConfigError("clients", "expected an array");
    for (const auto& e : arr) {
      check_keys(e, {"tx", "targets", "round"}, "clients");
      ClientDirective d;
      d.body = get_field<std::string>(e, "tx");
      if (e.contains("targets")) d.targets = get_field<std::vector<ReplicaId>>(e, "targets");
      d.round = get_field<Round>(e, "round");
      c.directives.push_back(std::move(d));
    }
  }
  if (j.contains("workload")) {
    const auto& w = j.at("workload");
    check_keys(w, {"tx_count", "start_ms", "interval_ms", "jitter_ms", "prefix"}, "workload");
    if (w.contains("tx_count")) c.workload.tx_count = get_field<std::uint32_t>(w, "tx_count");
    if (w.contains("start_ms")) c.workload.start_ms = get_field<SimTime>(w, "start_ms");
    if (w.contains("interval_ms")) c.workload.interval_ms = get_field<double>(w, "interval_ms");
    if (w.contains("jitter_ms")) c.workload.jitter_ms = get_field<SimTime>(w, "jitter_ms");
    if (w.contains("prefix")) c.workload.prefix = get_field<std::string>(w, "prefix");
  }
  c.validate();
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const SimConfig& c) {
  json j;
  j["n"] = c.n;
  j["f"] = c.f;
  j["gamma"] = c.gamma;
  j["wave_len"] = c.wave_len;
  j["seed"] = c.seed;
  j["max_rounds"] = c.max_rounds;
  j["delivery_model"] = to_string(c.delivery_model);
  j["delay_min_ms"] = c.delay_min_ms;
  j["delay_max_ms"] = c.delay_max_ms;
  j["parent_wait_ms"] = c.parent_wait_ms;
  j["self_reference"] = c.self_reference;
  j["batch_max_entries"] = c.batch_max_entries;
  j["enforce_thresholds"] = c.enforce_thresholds;
  json extra = json::object();
  for (const auto& [r, ms] : c.outbound_extra_ms) extra[std::to_string(r)] = ms;
  j["outbound_extra_ms"] = extra;
  j["faults"] = json::array();
  for (const auto& e : c.faults)
    j["faults"].push_back({{"replica", e.replica},
                           {"strategy", to_string(e.strategy)},
                           {"activation_round", e.activation_round}});
  j["clients"] = json::array();
  for (const auto& d : c.directives)
    j["clients"].push_back({{"tx", d.body}, {"targets", d.targets}, {"round", d.round}});
  j["workload"] = {{"tx_count", c.workload.tx_count},
                   {"start_ms", c.workload.start_ms},
                   {"interval_ms", c.workload.interval_ms},
                   {"jitter_ms", c.workload.jitter_ms},
                   {"prefix", c.workload.prefix}};
  return j.dump(2);
}

}  // namespace herring
