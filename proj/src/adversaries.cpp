#include "herring/adversaries.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace herring::adversary {

std::vector<worker::OrderEntry> reverse_order_strategy(const std::vector<worker::OrderEntry>& local) {
  std::vector<worker::OrderEntry> out(local.rbegin(), local.rend());
  for (std::size_t i = 0; i < out.size(); ++i) out[i].loi = local[i].loi;
  return out;
}

std::vector<FaultEntry> random_crash_schedule(std::uint32_t n, std::uint32_t count,
                                              Round last_round, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed ^ 0x6372617368ULL));
  std::vector<ReplicaId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::uniform_int_distribution<Round> when(1, std::max<Round>(1, last_round));
  std::vector<FaultEntry> out;
  for (std::uint32_t k = 0; k < count && k < n; ++k)
    out.push_back({ids[k], FaultStrategy::kSilentCrash, when(rng)});
  std::sort(out.begin(), out.end(),
            [](const FaultEntry& a, const FaultEntry& b) { return a.replica < b.replica; });
  return out;
}

std::vector<FaultEntry> reversing_schedule(std::uint32_t n, std::uint32_t count) {
  std::vector<FaultEntry> out;
  for (std::uint32_t k = 0; k < count && k < n; ++k)
    out.push_back({n - count + k, FaultStrategy::kReverseLocalOrder, 1});
  return out;
}

}  // namespace herring::adversary
