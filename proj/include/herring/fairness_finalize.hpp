#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "herring/fairness_graph.hpp"

namespace herring::fairness {

struct FinalOrder {
  SubdagId r = 0;
  std::vector<Digest> digests;
  /// One entry per SCC, in emission order; sizes sum to digests.size().
  std::vector<std::uint32_t> batch_sizes;
  bool operator==(const FinalOrder&) const = default;
};

/// Linearizes every SCC of the (augmented) graph in canonical order, members
/// sorted by digest. The graph must have no missing pairs.
FinalOrder finalize(const DepGraph& graph);

/// Tally outcome for one missing pair.
struct PairTally {
  std::uint32_t forward = 0;   // votes first -> second
  std::uint32_t backward = 0;  // votes second -> first
};

/// Parked graphs, routed votes, ready buffers and the emit cursor.
class FinalizationStore {
 public:
  explicit FinalizationStore(const Thresholds& th) : th_(th) {}

  void park(DepGraph graph);
  /// Stores a finalized order; throws if r is parked or already ready.
  void set_ready(FinalOrder order);

  /// Routes the votes carried by committed subdag `commit_seq`. Votes for
  /// subdags beyond `last_extracted` or already finalized are dropped, as is
  /// any vote after an author's first for the same target. Returns parked
  /// targets that now have at least n-f distinct authors.
  std::set<SubdagId> route_votes(SubdagId commit_seq, const std::vector<worker::FairUpdateVote>& votes,
                                 SubdagId last_extracted);

  /// Resolves parked r with the earliest commit-granular vote prefix that has
  /// n-f authors and decides every missing pair. Returns the finalized order,
  /// or nothing if no such prefix exists yet.
  std::optional<FinalOrder> try_resolve(SubdagId r);

  /// Drains ready[next], ready[next+1], ...
  std::vector<FinalOrder> emit();

  bool is_parked(SubdagId r) const { return parked_.contains(r); }
  bool is_finalized(SubdagId r) const { return r < next_ || ready_.contains(r); }
  std::size_t parked_count() const { return parked_.size(); }
  std::set<SubdagId> parked_ids() const;
  SubdagId next() const { return next_; }
  std::size_t distinct_authors(SubdagId r) const;
  /// Targets that received all n authors and still have an undecided pair.
  const std::set<SubdagId>& stuck() const { return stuck_; }
  /// Vote tally for a missing pair of a parked graph over all routed votes.
  std::optional<PairTally> tally(SubdagId r, const TxPair& pair) const;

 private:
  struct VoteRecord {
    SubdagId commit_seq;
    ReplicaId author;
    std::vector<DirectedEdge> edges;
  };

  Thresholds th_;
  std::map<SubdagId, DepGraph> parked_;
  std::map<SubdagId, std::vector<VoteRecord>> votes_;
  std::map<SubdagId, std::set<ReplicaId>> authors_;
  std::map<SubdagId, FinalOrder> ready_;
  std::set<SubdagId> stuck_;
  SubdagId next_ = 1;
};

}  // namespace herring::fairness
