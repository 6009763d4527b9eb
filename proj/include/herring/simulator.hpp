#pragma once

#include <memory>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "herring/config.hpp"
#include "herring/dag.hpp"
#include "herring/pipeline.hpp"
#include "herring/trace.hpp"
#include "herring/worker.hpp"

namespace herring::sim {

struct SimResult {
  trace::RunTrace trace;
  std::vector<CommittedSubdag> committed;
  std::vector<fairness::FinalOrder> emitted;
  /// Every transaction handed to at least one replica.
  std::vector<Digest> injected;
  std::set<SubdagId> parked_at_end;
  SimTime end_time = 0;
  Round highest_round = 0;
  bool all_emitted = false;
};

/// Deterministic discrete-event simulation of the DAG, the commit rule and
/// the in-loop fairness engine. One coordinator advances everything.
class Simulator {
 public:
  explicit Simulator(SimConfig cfg, std::string scenario = "");
  ~Simulator();

  /// Processes events until every live replica has a certified vertex one
  /// round past the last call. Returns that round's vertices and certificates.
  std::vector<std::pair<dag::Vertex, dag::Certificate>> advance_round();
  /// Runs to the horizon, or until every injected transaction is emitted and
  /// nothing is parked.
  SimResult run();

  const dag::DagStore& dag() const { return dag_; }
  const trace::RunTrace& trace() const { return trace_; }
  bool crashed(ReplicaId r) const;
  const worker::Worker& worker(ReplicaId r) const;

 private:
  enum class Kind { kInject, kClientTx, kProposeTimer, kBatchArrive, kCertForm, kCertArrive, kFairPropose };
  struct Event {
    SimTime t = 0;
    std::uint64_t seq = 0;
    Kind kind = Kind::kInject;
    ReplicaId to = 0;
    ReplicaId author = 0;
    Round round = 0;
    std::size_t tx = 0;
    std::shared_ptr<const worker::Batch> batch;
    std::shared_ptr<const std::vector<TxPair>> missing;
    std::vector<ReplicaId> attestors;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.t != b.t ? a.t > b.t : a.seq > b.seq;
    }
  };
  struct Replica;

  void start();
  bool step();
  void push(Event e);
  SimTime delay(ReplicaId from);
  bool live(ReplicaId r) const;

  void on_inject(const Event& e);
  void on_client_tx(ReplicaId to, std::size_t tx, SimTime now);
  void check_propose(ReplicaId i, Round round);
  void propose(ReplicaId i, Round round);
  void on_cert_form(const Event& e);
  void on_cert_arrive(const Event& e);
  void on_batch_arrive(const Event& e);
  void on_fair_propose(const Event& e);
  void record_votes(ReplicaId i);
  void commit(const std::vector<CommittedSubdag>& subdags);
  std::size_t tx_index(const std::string& body);
  bool done() const;

  SimConfig cfg_;
  std::string scenario_;
  Thresholds th_;
  dag::DagStore dag_;
  std::vector<std::unique_ptr<Replica>> replicas_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  SimTime now_ = 0;
  std::mt19937_64 net_rng_;
  std::mt19937_64 client_rng_;
  trace::RunTrace trace_;
  std::unique_ptr<fairness::FairnessPipeline> engine_;
  ReplicaId observer_ = 0;

  std::vector<worker::Transaction> txs_;
  std::unordered_map<std::string, std::size_t> body_index_;
  std::vector<char> injected_;
  std::vector<Digest> injected_order_;
  std::size_t total_tx_ = 0;
  std::size_t emitted_tx_ = 0;
  std::uint64_t log_position_ = 0;
  std::vector<CommittedSubdag> committed_;
  std::vector<fairness::FinalOrder> emitted_;
  Round advanced_to_ = 0;
  bool started_ = false;
};

}  // namespace herring::sim
