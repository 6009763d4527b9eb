#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "herring/config.hpp"

namespace herring {

enum class BaselineKind { kNone, kFairDag, kDod };

struct Scenario {
  std::string name;
  SimConfig config;
  /// Which baseline model accompanies the run, if any.
  BaselineKind baseline = BaselineKind::kNone;
};

/// Library scenarios. Throws ConfigError("scenario") for an unknown name.
Scenario build_scenario(const std::string& name, std::uint64_t seed = 1);
std::vector<std::string> scenario_names();

/// Random-workload run with up to f crash faults, used by the sweeps.
SimConfig sweep_config(std::uint32_t n, std::uint32_t f, double gamma, std::uint64_t seed,
                       std::uint32_t tx_count, std::uint32_t crashes);

}  // namespace herring
