#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "herring/common.hpp"
#include "herring/scc.hpp"
#include "herring/subdag.hpp"

namespace herring::fairness {

using DigestSet = std::unordered_set<Digest, DigestHash>;

/// Per-replica orderings L_i handed to one subdag's task.
struct Snapshot {
  SubdagId r = 0;
  /// Ascending replica id; only replicas with a non-empty list appear.
  std::vector<std::pair<ReplicaId, std::vector<Digest>>> lists;
};

struct WeightReport {
  SubdagId r = 0;
  /// c(tx) for every transaction in the snapshot, ascending digest.
  std::vector<std::pair<Digest, std::uint32_t>> support;
  /// V_r in ascending digest order.
  std::vector<Digest> admitted;
  std::vector<char> solid;
  /// Row-major |V_r| x |V_r|: weight[u * m + v] = #lists with u before v.
  std::vector<std::uint32_t> weight;

  std::size_t size() const { return admitted.size(); }
  std::uint32_t w(std::size_t u, std::size_t v) const { return weight[u * admitted.size() + v]; }
};

/// Pure function of the snapshot.
WeightReport phase1_weights(const Snapshot& snap, const Thresholds& th);

/// Cumulative K_1 u ... u K_r, handed from each task to the next.
using ChainToken = std::shared_ptr<const DigestSet>;

ChainToken empty_chain();

struct DepGraph {
  SubdagId r = 0;
  /// Ascending digest; indices below refer to this vector.
  std::vector<Digest> vertices;
  std::vector<char> solid;
  Adjacency out;
  /// Index pairs (u < v) with neither direction at the threshold.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> missing;
  /// Canonical condensation order, filled by phase 3.
  std::vector<std::vector<std::uint32_t>> sccs;
  /// Zero-based index into `sccs`; empty when there is no solid vertex.
  std::optional<std::size_t> anchor;

  bool has_edge(std::uint32_t u, std::uint32_t v) const;
  std::vector<TxPair> missing_pairs() const;
  std::size_t edge_count() const;
  std::optional<std::uint32_t> index_of(const Digest& d) const;
};

/// Drops the prior chain from V_r and adds an edge for every pair whose larger
/// weight reaches tau. Equal weights point from the smaller digest.
DepGraph phase2_build_graph(const WeightReport& report, const DigestSet& prior_chain,
                            std::uint32_t tau);

/// Computes SCCs and the anchor and truncates the graph in place to C_1..C_a.
/// A graph with no solid vertex retains nothing.
void truncate_at_anchor(DepGraph& graph);
/// prior_chain plus the graph's retained vertices.
ChainToken extend_chain(const ChainToken& prior_chain, const DepGraph& graph);
/// truncate_at_anchor followed by extend_chain.
ChainToken phase3_anchor(DepGraph& graph, const ChainToken& prior_chain);

/// Synchronous per-replica cumulative state owned by the coordinator.
class CumulativeState {
 public:
  explicit CumulativeState(const Thresholds& th) : th_(th) {}

  struct Extracted {
    Snapshot snapshot;
    /// Solid set of the snapshot, recorded as this subdag's claim.
    std::vector<Digest> claim;
  };

  /// Ingests the subdag's contributions and builds its snapshot. Subdags must
  /// arrive with consecutive ids starting at 1.
  Extracted extract_snapshot(const CommittedSubdag& subdag);
  /// Promotes K_r to the proposed set and drops r's claim.
  void apply_result(SubdagId r, const std::vector<Digest>& retained);

  SubdagId last_extracted() const { return last_extracted_; }
  bool is_proposed(const Digest& d) const { return proposed_.contains(d); }
  std::size_t active_claims() const { return claims_.size(); }
  std::size_t pending_size(ReplicaId i) const;
  const std::vector<Digest>* pending(ReplicaId i) const;

 private:
  Thresholds th_;
  SubdagId last_extracted_ = 0;
  std::map<ReplicaId, std::vector<Digest>> pending_;
  std::map<ReplicaId, DigestSet> seen_;
  DigestSet proposed_;
  std::map<SubdagId, std::vector<Digest>> claims_;
  std::unordered_map<Digest, std::uint32_t, DigestHash> claimed_;
  std::set<SubdagId> applied_;
};

}  // namespace herring::fairness
