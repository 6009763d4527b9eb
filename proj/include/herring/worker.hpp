#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "herring/common.hpp"

namespace herring::worker {

struct Transaction {
  std::string body;
  Digest digest;

  static Transaction from_body(std::string body) {
    Digest d = Digest::of(body);
    return Transaction{std::move(body), d};
  }
  bool operator==(const Transaction&) const = default;
};

/// One (transaction, LOI) report as it appears in a replica's ordering
/// contribution.
struct OrderEntry {
  Digest tx;
  Loi loi = 0;
  bool operator==(const OrderEntry&) const = default;
};

struct DirectEntry {
  Transaction tx;
  Loi loi = 0;
  bool operator==(const DirectEntry&) const = default;
};

struct FairUpdateVote {
  SubdagId target = 0;
  ReplicaId author = kNoReplica;
  std::vector<DirectedEdge> edges;
  bool operator==(const FairUpdateVote&) const = default;
};

/// Sealed batch. Direct and indirect entries are each LOI-ascending.
struct Batch {
  ReplicaId author = kNoReplica;
  std::uint64_t sequence = 0;
  std::vector<DirectEntry> direct_entries;
  std::vector<OrderEntry> indirect_entries;
  std::vector<FairUpdateVote> votes;

  /// Direct and indirect entries merged in ascending LOI order; this is the
  /// author's ordering contribution carried into the DAG.
  std::vector<OrderEntry> contribution() const;
  bool empty() const { return direct_entries.empty() && indirect_entries.empty() && votes.empty(); }
  bool operator==(const Batch&) const = default;
};

/// Assigns each transaction a monotone local ordering indicator on first
/// observation. Re-observation returns the stored value.
class LoiTracker {
 public:
  /// Returns the LOI and whether this was the first observation.
  std::pair<Loi, bool> record(const Digest& tx);
  std::optional<Loi> lookup(const Digest& tx) const;
  bool knows(const Digest& tx) const { return assignment_.contains(tx); }
  Loi next_loi() const { return next_loi_; }
  std::size_t size() const { return assignment_.size(); }

 private:
  Loi next_loi_ = 0;
  std::unordered_map<Digest, Loi, DigestHash> assignment_;
};

/// Vote state: unresolved pairs P[r] and directed resolutions V[r].
class PendingEdgeStore {
 public:
  /// Pairs in M_r with both LOIs known become directed votes; others are
  /// deferred. Throws ProtocolError on a duplicate FairPropose for r.
  void on_fair_propose(SubdagId r, const std::vector<TxPair>& missing, const LoiTracker& tracker);
  /// Re-scans deferred pairs that have `tx` as an endpoint.
  void on_new_tx(const Digest& tx, const LoiTracker& tracker);
  /// Completed vote sets (P[r] empty) in ascending r; they are removed from V.
  std::vector<std::pair<SubdagId, std::vector<DirectedEdge>>> take_completed();

  const std::set<TxPair>* unresolved(SubdagId r) const;
  const std::vector<DirectedEdge>* resolved(SubdagId r) const;
  bool has_proposal(SubdagId r) const { return proposed_.contains(r); }

 private:
  void resolve(SubdagId r, const TxPair& pair, const LoiTracker& tracker);
  void check_complete(SubdagId r);

  std::set<SubdagId> proposed_;
  std::map<SubdagId, std::set<TxPair>> pending_;
  std::map<SubdagId, std::vector<DirectedEdge>> resolved_;
  std::unordered_map<Digest, std::set<SubdagId>, DigestHash> by_endpoint_;
  std::set<SubdagId> completed_;
};

/// Per-replica worker: LOI tracking, batch assembly and FairUpdate voting.
/// With `reverse_order` set the worker behaves as the reversing adversary:
/// each sealed batch reports its entries in reverse receive order. Voting stays
/// honest.
class Worker {
 public:
  explicit Worker(ReplicaId id, bool reverse_order = false) : id_(id), reverse_(reverse_order) {}

  /// Client submission. Returns the LOI and whether it was a first observation.
  std::pair<Loi, bool> on_client_tx(const Transaction& tx);
  /// Remote batch. Returns the digests observed for the first time.
  std::vector<Digest> on_remote_batch(const Batch& batch);
  void on_fair_propose(SubdagId r, const std::vector<TxPair>& missing);
  /// Re-injects entries of an orphaned vertex into the next batch.
  void reinject(const std::vector<OrderEntry>& entries);

  /// Drains pending entries and queued votes into a sealed batch. `max_entries`
  /// of 0 means unbounded.
  Batch build_batch(std::size_t max_entries = 0);

  /// Votes that were completed since the last call (for tracing).
  std::vector<FairUpdateVote> take_new_votes() { return std::exchange(new_votes_, {}); }

  const LoiTracker& tracker() const { return tracker_; }
  const PendingEdgeStore& edges() const { return edges_; }
  ReplicaId id() const { return id_; }
  bool reversing() const { return reverse_; }
  void set_reversing(bool on) { reverse_ = on; }
  std::size_t pending_entries() const { return direct_.size() + indirect_.size(); }
  std::size_t queued_votes() const { return votes_.size(); }

 private:
  void observe(const Digest& d);
  void collect_votes();

  ReplicaId id_;
  bool reverse_;
  LoiTracker tracker_;
  PendingEdgeStore edges_;
  std::vector<DirectEntry> direct_;
  std::vector<OrderEntry> indirect_;
  std::vector<FairUpdateVote> votes_;
  std::vector<FairUpdateVote> new_votes_;
  std::uint64_t sequence_ = 0;
};

/// Batch serialization. Binary form is length-prefixed little-endian.
std::vector<std::uint8_t> encode_binary(const Batch& batch);
Batch decode_binary(const std::vector<std::uint8_t>& bytes);
std::string encode_json(const Batch& batch);
Batch decode_json(const std::string& text);
Digest batch_digest(const Batch& batch);

}  // namespace herring::worker
