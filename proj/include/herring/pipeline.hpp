#pragma once

#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "herring/fairness_finalize.hpp"
#include "herring/fairness_graph.hpp"
#include "herring/subdag.hpp"
#include "herring/thread_pool.hpp"

namespace herring::fairness {

struct PipelineOptions {
  /// Each subdag's task finishes before the next one is dispatched.
  bool serial = false;
  std::size_t threads = 4;
  /// Maximum dispatched-but-unapplied tasks; 0 means `threads`.
  std::size_t inflight_cap = 0;
};

struct GraphSummary {
  SubdagId r = 0;
  std::size_t admitted = 0;  // |V_r| after the chain filter
  std::size_t missing = 0;   // |M_r| after truncation
  std::optional<std::size_t> anchor;  // zero-based SCC index
  std::vector<Digest> retained;       // K_r, ascending digest
  std::vector<Digest> solid;          // solid members of K_r
  bool parked = false;
};

struct PhaseTimes {
  SubdagId r = 0;
  std::int64_t extract_ns = 0;
  std::int64_t weights_ns = 0;
  std::int64_t build_ns = 0;
  std::int64_t tarjan_ns = 0;
  std::int64_t chain_ns = 0;
  std::int64_t finalize_ns = 0;
  std::int64_t result_ns = 0;
};

/// Coordinator-driven fairness layer. All public calls must come from one
/// thread; graph construction runs on the internal pool.
class FairnessPipeline {
 public:
  FairnessPipeline(const Thresholds& th, PipelineOptions opt = {});
  ~FairnessPipeline();
  FairnessPipeline(const FairnessPipeline&) = delete;
  FairnessPipeline& operator=(const FairnessPipeline&) = delete;

  /// Feeds the next committed subdag. Returns orders emitted as a result.
  std::vector<FinalOrder> on_commit(const CommittedSubdag& subdag);
  /// Waits for every dispatched task and returns what that emits.
  std::vector<FinalOrder> flush();

  std::function<void(SubdagId, const std::vector<TxPair>&)> on_parked;
  std::function<void(const GraphSummary&)> on_graph_built;
  std::function<void(const PhaseTimes&)> on_phase_times;
  std::function<void(SubdagId, const std::string&)> on_diagnostic;

  std::size_t in_flight() const { return inflight_.size(); }
  std::size_t parked_count() const { return store_.parked_count(); }
  std::set<SubdagId> parked_ids() const { return store_.parked_ids(); }
  SubdagId next_to_emit() const { return store_.next(); }
  SubdagId last_extracted() const { return state_.last_extracted(); }
  const FinalizationStore& store() const { return store_; }
  const CumulativeState& state() const { return state_; }
  bool serial() const { return opt_.serial; }

 private:
  struct TaskOutput {
    DepGraph graph;
    std::optional<FinalOrder> order;
    GraphSummary summary;
    PhaseTimes times;
  };
  struct InFlight {
    SubdagId r;
    std::future<TaskOutput> result;
  };

  static TaskOutput run_task(Snapshot snap, std::int64_t extract_ns, Thresholds th,
                             std::shared_future<ChainToken> prior,
                             std::shared_ptr<std::promise<ChainToken>> next);
  void handle(TaskOutput out);
  void resolve(const std::set<SubdagId>& targets);
  void check_stuck(SubdagId r);

  Thresholds th_;
  PipelineOptions opt_;
  CumulativeState state_;
  FinalizationStore store_;
  std::unique_ptr<ThreadPool> pool_;
  std::deque<InFlight> inflight_;
  std::shared_future<ChainToken> chain_;
  std::set<SubdagId> reported_stuck_;
};

}  // namespace herring::fairness
