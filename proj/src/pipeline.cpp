#include "herring/pipeline.hpp"

#include <chrono>

namespace herring::fairness {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

std::shared_future<ChainToken> ready_chain(ChainToken c) {
  std::promise<ChainToken> p;
  p.set_value(std::move(c));
  return p.get_future().share();
}

}  // namespace

FairnessPipeline::FairnessPipeline(const Thresholds& th, PipelineOptions opt)
    : th_(th), opt_(opt), state_(th), store_(th), chain_(ready_chain(empty_chain())) {
  if (opt_.threads == 0) opt_.threads = 1;
  if (opt_.inflight_cap == 0) opt_.inflight_cap = opt_.threads;
  if (!opt_.serial) pool_ = std::make_unique<ThreadPool>(opt_.threads);
}

FairnessPipeline::~FairnessPipeline() {
  for (auto& f : inflight_)
    if (f.result.valid()) f.result.wait();
}

FairnessPipeline::TaskOutput FairnessPipeline::run_task(Snapshot snap, std::int64_t extract_ns,
                                                        Thresholds th,
                                                        std::shared_future<ChainToken> prior,
                                                        std::shared_ptr<std::promise<ChainToken>> next) {
  TaskOutput out;
  out.times.r = snap.r;
  out.times.extract_ns = extract_ns;
  bool forwarded = false;
  try {
    auto t0 = Clock::now();
    WeightReport rep = phase1_weights(snap, th);
    out.times.weights_ns = since(t0);

    ChainToken chain = prior.get();
    t0 = Clock::now();
    out.graph = phase2_build_graph(rep, *chain, th.tau);
    out.times.build_ns = since(t0);
    out.summary.admitted = out.graph.vertices.size();

    t0 = Clock::now();
    truncate_at_anchor(out.graph);
    out.times.tarjan_ns = since(t0);
    t0 = Clock::now();
    ChainToken extended = extend_chain(chain, out.graph);
    out.times.chain_ns = since(t0);
    next->set_value(std::move(extended));
    forwarded = true;

    const DepGraph& g = out.graph;
    out.summary.r = g.r;
    out.summary.missing = g.missing.size();
    out.summary.anchor = g.anchor;
    out.summary.retained = g.vertices;
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
      if (g.solid[i]) out.summary.solid.push_back(g.vertices[i]);

    t0 = Clock::now();
    if (g.missing.empty()) {
      out.order = finalize(g);
    } else {
      out.summary.parked = true;
    }
    out.times.finalize_ns = since(t0);
  } catch (...) {
    if (!forwarded) next->set_exception(std::current_exception());
    throw;
  }
  return out;
}

std::vector<FinalOrder> FairnessPipeline::on_commit(const CommittedSubdag& subdag) {
  if (!opt_.serial) {
    while (!inflight_.empty() &&
           inflight_.front().result.wait_for(std::chrono::seconds(0)) == std::future_status::ready) {
      auto out = inflight_.front().result.get();
      inflight_.pop_front();
      handle(std::move(out));
    }
    while (inflight_.size() >= opt_.inflight_cap) {
      auto out = inflight_.front().result.get();
      inflight_.pop_front();
      handle(std::move(out));
    }
  }

  auto t0 = Clock::now();
  auto extracted = state_.extract_snapshot(subdag);
  std::int64_t extract_ns = since(t0);

  auto next = std::make_shared<std::promise<ChainToken>>();
  auto prior = chain_;
  chain_ = next->get_future().share();
  if (opt_.serial) {
    handle(run_task(std::move(extracted.snapshot), extract_ns, th_, prior, next));
  } else {
    auto fut = pool_->submit([snap = std::move(extracted.snapshot), extract_ns, th = th_, prior,
                              next]() mutable {
      return run_task(std::move(snap), extract_ns, th, prior, next);
    });
    inflight_.push_back({subdag.id, std::move(fut)});
  }

  std::vector<worker::FairUpdateVote> votes;
  for (const auto& v : subdag.vertices) votes.insert(votes.end(), v.votes.begin(), v.votes.end());
  if (!votes.empty()) {
    auto targets = store_.route_votes(subdag.id, votes, state_.last_extracted());
    resolve(targets);
    for (const auto& v : votes) check_stuck(v.target);
  }
  return store_.emit();
}

std::vector<FinalOrder> FairnessPipeline::flush() {
  while (!inflight_.empty()) {
    auto out = inflight_.front().result.get();
    inflight_.pop_front();
    handle(std::move(out));
  }
  return store_.emit();
}

void FairnessPipeline::handle(TaskOutput out) {
  auto t0 = Clock::now();
  SubdagId r = out.summary.r;
  state_.apply_result(r, out.graph.vertices);
  if (out.order) {
    store_.set_ready(std::move(*out.order));
  } else {
    auto missing = out.graph.missing_pairs();
    store_.park(std::move(out.graph));
    if (on_parked) on_parked(r, missing);
    resolve({r});
    check_stuck(r);
  }
  out.times.result_ns = since(t0);
  if (on_graph_built) on_graph_built(out.summary);
  if (on_phase_times) on_phase_times(out.times);
}

void FairnessPipeline::resolve(const std::set<SubdagId>& targets) {
  for (SubdagId r : targets) {
    if (!store_.is_parked(r)) continue;
    if (auto order = store_.try_resolve(r)) store_.set_ready(std::move(*order));
  }
}

void FairnessPipeline::check_stuck(SubdagId r) {
  if (!store_.stuck().contains(r) || reported_stuck_.contains(r)) return;
  reported_stuck_.insert(r);
  if (on_diagnostic)
    on_diagnostic(r, "all replicas voted and a missing pair is still below the edge threshold");
}

}  // namespace herring::fairness
