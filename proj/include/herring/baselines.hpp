#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "herring/common.hpp"

// Minimal models of two other fairness layers, enough to reproduce their
// liveness bugs and the fixes.
namespace herring::baseline {

using Tx = std::string;

/// One committed vertex: the author's (transaction, indicator) list.
struct ModelVertex {
  ReplicaId author = 0;
  std::vector<std::pair<Tx, Loi>> entries;
};
using ModelSubdag = std::vector<ModelVertex>;

enum class FairDagMode { kUnpatched, kPatched };

/// Weight bookkeeping of the FairDAG-RL fairness layer.
class FairDagModel {
 public:
  FairDagModel(std::uint32_t n, std::uint32_t f, FairDagMode mode);

  /// Processes one committed subdag. Returns the ids of graphs that became
  /// tournaments during this call.
  std::vector<std::size_t> on_subdag(const ModelSubdag& subdag);

  std::uint32_t shaded_threshold() const { return shaded_; }
  std::uint32_t solid_threshold() const { return solid_; }
  std::size_t graph_count() const { return graphs_.size(); }
  /// Graph holding `tx`, if any.
  std::optional<std::size_t> graph_of(const Tx& tx) const;
  std::uint32_t weight(std::size_t graph, const Tx& from, const Tx& to) const;
  bool has_edge(std::size_t graph, const Tx& from, const Tx& to) const;
  bool is_tournament(std::size_t graph) const;
  /// Graphs finalized in order; stops at the first non-tournament graph.
  std::size_t executed() const { return executed_; }
  std::size_t subdags_processed() const { return subdags_; }

 private:
  struct Graph {
    std::vector<Tx> members;
    std::map<std::pair<Tx, Tx>, std::uint32_t> weight;
    std::set<std::pair<Tx, Tx>> edges;
    // (replica, unordered pair) already counted
    std::set<std::pair<ReplicaId, std::pair<Tx, Tx>>> counted;
  };
  void count(Graph& g, ReplicaId i, const Tx& a, const Tx& b);

  std::uint32_t n_;
  FairDagMode mode_;
  std::uint32_t shaded_;
  std::uint32_t solid_;
  std::map<Tx, std::vector<std::optional<Loi>>> ois_;
  std::map<Tx, std::size_t> graph_of_;
  std::vector<Graph> graphs_;
  std::size_t executed_ = 0;
  std::size_t subdags_ = 0;
};

struct FairDagOutcome {
  std::uint32_t weight_ab = 0;
  std::uint32_t weight_ba = 0;
  bool edge_added = false;
  bool finalized = false;
  std::size_t rounds = 0;
  std::size_t executed = 0;
};

/// The two-subdag attack followed by filler subdags up to `horizon` rounds.
FairDagOutcome run_fairdag_attack(FairDagMode mode, std::size_t horizon = 1000);

enum class DodMode { kBuggy, kExplicitPatch };

/// Missing-edge store and execution queue of the DoD fairness layer.
class DodModel {
 public:
  DodModel(std::uint32_t n, std::uint32_t f, double gamma, DodMode mode);

  /// A replica's local order for `round`.
  void local_order(ReplicaId replica, Round round, std::vector<Tx> order);
  /// Physical arrival of a transaction at the modeled replica.
  void arrival(const Tx& tx);
  /// Builds and commits the global-order graph of `round` from the given
  /// quorum of local orders.
  void global_order(Round round, const std::vector<ReplicaId>& quorum);
  /// Explicit resolution broadcast: `from` precedes `to` at `voter`.
  void explicit_vote(ReplicaId voter, const Tx& from, const Tx& to);
  /// Executes committed graphs whose missing edges are resolved.
  std::size_t drain();

  std::uint32_t edge_threshold() const { return tau_; }
  std::uint32_t w(const Tx& from, const Tx& to) const;
  bool is_missing(const Tx& a, const Tx& b) const;
  bool resolved(const Tx& a, const Tx& b) const;
  std::size_t queued() const { return queue_.size(); }
  std::size_t executed() const { return executed_; }

 private:
  struct Pending {
    Round round;
    std::vector<std::pair<Tx, Tx>> missing;
  };
  static std::pair<Tx, Tx> key(const Tx& a, const Tx& b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

  std::uint32_t n_;
  std::uint32_t f_;
  std::uint32_t tau_;
  DodMode mode_;
  std::map<std::pair<ReplicaId, Round>, std::vector<Tx>> local_;
  // directional weights for missing pairs; key is the canonical pair
  std::map<std::pair<Tx, Tx>, std::pair<std::uint32_t, std::uint32_t>> mw_;
  std::map<std::pair<Tx, Tx>, std::set<ReplicaId>> voters_;
  std::map<std::pair<Tx, Tx>, std::pair<std::uint32_t, std::uint32_t>> tally_;
  std::set<std::pair<Tx, Tx>> resolved_;
  std::vector<Pending> queue_;
  std::size_t executed_ = 0;
};

struct DodOutcome {
  std::uint32_t w_ab = 0;
  std::uint32_t w_ba = 0;
  std::uint32_t threshold = 0;
  bool reached_threshold = false;
  bool queue_stalled = false;
  std::size_t executed = 0;
  std::size_t queued = 0;
};

/// The round table with R5 crashed, followed by `extra_rounds` filler rounds.
DodOutcome run_dod_scenario(DodMode mode, std::size_t extra_rounds = 20);

/// Two replicas compute w(a,b) from different quorums, exchange the bare
/// pair and add one on receipt.
struct DivergenceVignette {
  std::uint32_t first_stored = 0, second_stored = 0;
  std::uint32_t first_after = 0, second_after = 0;
};
DivergenceVignette weight_divergence_vignette();

/// N-f honest replicas broadcast the same missing pair; each copy adds one.
struct InflationVignette {
  std::uint32_t evidence = 0;  // local orders supporting the direction
  std::uint32_t after = 0;     // stored weight after the broadcasts
  std::uint32_t threshold = 0;
};
InflationVignette weight_inflation_vignette(std::uint32_t n = 5, std::uint32_t f = 1);

}  // namespace herring::baseline
