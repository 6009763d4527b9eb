#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "herring/common.hpp"
#include "herring/fairness_finalize.hpp"
#include "herring/subdag.hpp"
#include "herring/trace.hpp"

// Reference implementations and checkers. Nothing here calls into the
// pipeline modules; only the shared domain types are used.
namespace herring::oracle {

/// One subdag's graph as the reference computed it.
struct RefGraph {
  SubdagId r = 0;
  /// V_r after the chain filter, ascending digest.
  std::vector<Digest> admitted;
  /// weight[u * m + v] over `admitted`.
  std::vector<std::uint32_t> weight;
  std::vector<Digest> retained;
  std::size_t missing = 0;
  bool parked = false;
  std::optional<SubdagId> resolved_at;  // commit id of the deciding vote prefix

  std::uint32_t w(std::size_t u, std::size_t v) const { return weight[u * admitted.size() + v]; }
};

struct SerialReference {
  /// Emitted prefix: stops at the first subdag that never resolves.
  std::vector<fairness::FinalOrder> orders;
  std::vector<RefGraph> graphs;
  std::set<SubdagId> unresolved;
};

/// Replays the committed sequence one subdag at a time, each fully finished
/// (votes included) before the next begins.
SerialReference serial_reference(const std::vector<CommittedSubdag>& committed,
                                 const Thresholds& th);

/// Ground-truth receive order of every replica, from tx_received events.
std::map<ReplicaId, std::vector<Digest>> receive_orders(const trace::RunTrace& trace);

struct FairnessViolation {
  Digest first;   // received first by `support` replicas
  Digest second;
  std::uint32_t support = 0;
  std::optional<std::size_t> first_batch;  // global batch index, empty if never emitted
  std::size_t second_batch = 0;
};

struct BatchOfReport {
  std::vector<FairnessViolation> violations;
  std::size_t checked_pairs = 0;
  /// Pairs outside the received-by-all scope.
  std::size_t skipped_pairs = 0;
  bool ok() const { return violations.empty(); }
};

/// Brute force over all pairs received by all n replicas.
BatchOfReport check_batch_of(const trace::RunTrace& trace,
                             const std::vector<fairness::FinalOrder>& emitted, double gamma);

struct CheckResult {
  bool ok = true;
  std::string detail;
};

/// Every digest is retained by at most one graph.
CheckResult check_single_graph(const trace::RunTrace& trace);

/// Each correct replica's committed contributions, concatenated in commit
/// order, carry nondecreasing LOIs.
CheckResult check_loi_monotone(const trace::RunTrace& trace);

struct DistBucket {
  std::uint32_t dist = 0;
  std::size_t pairs = 0;
  std::size_t reversed = 0;
  /// Pairs whose honest direction held the edge in every graph they shared.
  std::size_t certified = 0;
  std::size_t certified_reversed = 0;
  double reversed_fraction() const { return pairs ? double(reversed) / double(pairs) : 0.0; }
};

struct DistReport {
  std::uint32_t n = 0;
  std::vector<DistBucket> buckets;  // ascending dist, empty buckets omitted
  std::size_t ties = 0;             // honest replicas split evenly
  std::size_t skipped = 0;          // not reported by every replica or not emitted
};

/// Pair reversal histogram. Byzantine replicas contribute the order they
/// reported; the honest direction is the majority of correct replicas.
DistReport dist_histogram(const trace::RunTrace& trace,
                          const std::vector<fairness::FinalOrder>& emitted,
                          const SerialReference* reference = nullptr, const Thresholds* th = nullptr);

void write_dist_csv(std::ostream& out, const DistReport& report);

}  // namespace herring::oracle
