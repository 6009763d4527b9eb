#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "herring/common.hpp"

namespace herring {

enum class DeliveryModel { kLockstep, kRandom };

enum class FaultStrategy { kSilentCrash, kReverseLocalOrder };

struct FaultEntry {
  ReplicaId replica = 0;
  FaultStrategy strategy = FaultStrategy::kSilentCrash;
  Round activation_round = 0;
};

/// A transaction handed to a subset of replicas just before each of them
/// seals its vertex for `round`.
struct ClientDirective {
  std::string body;
  std::vector<ReplicaId> targets;  // empty means every replica
  Round round = 1;
};

/// Open-loop random workload: every transaction goes to every replica with
/// independent per-replica jitter.
struct Workload {
  std::uint32_t tx_count = 0;
  SimTime start_ms = 1;
  double interval_ms = 1.0;
  SimTime jitter_ms = 0;
  std::string prefix = "tx";
};

struct SimConfig {
  std::uint32_t n = 4;
  std::uint32_t f = 1;
  double gamma = 1.0;
  std::uint32_t wave_len = 2;
  std::uint64_t seed = 1;
  Round max_rounds = 60;
  DeliveryModel delivery_model = DeliveryModel::kRandom;
  SimTime delay_min_ms = 5;
  SimTime delay_max_ms = 25;
  /// Extra one-way delay added to everything a replica sends.
  std::map<ReplicaId, SimTime> outbound_extra_ms;
  /// After a quorum of parents is held, how long to wait for the rest.
  SimTime parent_wait_ms = 10;
  bool self_reference = true;
  std::size_t batch_max_entries = 0;
  /// Baseline models run outside the Herring thresholds.
  bool enforce_thresholds = true;

  std::vector<FaultEntry> faults;
  std::vector<ClientDirective> directives;
  Workload workload;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  Thresholds thresholds() const { return Thresholds::make(n, f, gamma); }
  std::optional<FaultEntry> fault_of(ReplicaId r) const;
  bool is_faulty(ReplicaId r) const { return fault_of(r).has_value(); }
};

const char* to_string(DeliveryModel m);
const char* to_string(FaultStrategy s);

/// JSON scenario document. Unknown keys are rejected.
SimConfig parse_config(const std::string& json_text);
SimConfig load_config(const std::string& path);
std::string dump_config(const SimConfig& cfg);

}  // namespace herring
