#pragma once

#include <cstdint>
#include <vector>

#include "herring/config.hpp"
#include "herring/worker.hpp"

namespace herring::adversary {

/// What a reversing replica reports for one sealed contribution: the LOI
/// slots stay ascending but the transactions fill them in reverse receive
/// order.
std::vector<worker::OrderEntry> reverse_order_strategy(const std::vector<worker::OrderEntry>& local);

/// Up to `count` crash faults on distinct random replicas, each activating at
/// a uniform round in [1, last_round].
std::vector<FaultEntry> random_crash_schedule(std::uint32_t n, std::uint32_t count,
                                              Round last_round, std::uint64_t seed);

/// Replicas n-count .. n-1 reverse from round 1.
std::vector<FaultEntry> reversing_schedule(std::uint32_t n, std::uint32_t count);

}  // namespace herring::adversary
