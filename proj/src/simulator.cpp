#include "herring/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace herring::sim {

struct Simulator::Replica {
  explicit Replica(ReplicaId id) : worker(id) {}
  worker::Worker worker;
  bool crashed = false;
  bool correct = true;
  Round last_proposed = 0;
  std::vector<std::set<ReplicaId>> held;
  std::set<Round> timer_armed;
  std::set<Round> timer_fired;
  std::map<Round, std::vector<std::size_t>> directives;
  Round orphan_scan = 0;

  std::set<ReplicaId>& held_at(Round r) {
    if (held.size() <= r) held.resize(r + 1);
    return held[r];
  }
};

Simulator::Simulator(SimConfig cfg, std::string scenario)
    : cfg_(std::move(cfg)),
      scenario_(std::move(scenario)),
      th_((cfg_.validate(), cfg_.thresholds())),
      dag_(cfg_.n, cfg_.f, th_.quorum, cfg_.wave_len, cfg_.seed),
      net_rng_(mix64(cfg_.seed ^ 0x6e6574776f726b00ULL)),
      client_rng_(mix64(cfg_.seed ^ 0x636c69656e747300ULL)) {
  for (ReplicaId i = 0; i < cfg_.n; ++i) {
    replicas_.push_back(std::make_unique<Replica>(i));
    replicas_.back()->correct = !cfg_.is_faulty(i);
  }
  for (ReplicaId i = 0; i < cfg_.n; ++i) {
    if (replicas_[i]->correct) {
      observer_ = i;
      break;
    }
  }

  fairness::PipelineOptions opt;
  opt.serial = true;
  engine_ = std::make_unique<fairness::FairnessPipeline>(th_, opt);
  engine_->on_parked = [this](SubdagId r, const std::vector<TxPair>& missing) {
    trace_.add(now_, observer_, trace::GraphParked{r, missing});
    auto shared = std::make_shared<const std::vector<TxPair>>(missing);
    for (ReplicaId j = 0; j < cfg_.n; ++j) {
      if (!live(j)) continue;
      Event e;
      e.t = now_ + delay(j);
      e.kind = Kind::kFairPropose;
      e.to = j;
      e.round = r;
      e.missing = shared;
      push(std::move(e));
    }
  };
  engine_->on_graph_built = [this](const fairness::GraphSummary& s) {
    trace_.add(now_, observer_,
               trace::GraphBuilt{s.r, s.admitted, s.missing, s.anchor, s.retained, s.solid});
  };
  engine_->on_phase_times = [this](const fairness::PhaseTimes& p) {
    trace_.add(now_, observer_, trace::PhaseTiming{p.r, "extract", p.extract_ns});
    trace_.add(now_, observer_, trace::PhaseTiming{p.r, "weights", p.weights_ns});
    trace_.add(now_, observer_, trace::PhaseTiming{p.r, "build", p.build_ns});
    trace_.add(now_, observer_, trace::PhaseTiming{p.r, "tarjan_topo", p.tarjan_ns});
    trace_.add(now_, observer_, trace::PhaseTiming{p.r, "chain", p.chain_ns});
    trace_.add(now_, observer_, trace::PhaseTiming{p.r, "finalize", p.finalize_ns});
    trace_.add(now_, observer_, trace::PhaseTiming{p.r, "result", p.result_ns});
  };
  engine_->on_diagnostic = [this](SubdagId r, const std::string& msg) {
    trace_.add(now_, observer_,
               trace::Diagnostic{"vote_stall", "subdag " + std::to_string(r) + ": " + msg});
  };
}

Simulator::~Simulator() = default;

bool Simulator::crashed(ReplicaId r) const { return replicas_.at(r)->crashed; }

const worker::Worker& Simulator::worker(ReplicaId r) const { return replicas_.at(r)->worker; }

bool Simulator::live(ReplicaId r) const { return !replicas_[r]->crashed; }

void Simulator::push(Event e) {
  e.seq = seq_++;
  queue_.push(std::move(e));
}

SimTime Simulator::delay(ReplicaId from) {
  SimTime d = 1;
  if (cfg_.delivery_model == DeliveryModel::kRandom) {
    std::uniform_int_distribution<SimTime> dist(cfg_.delay_min_ms, cfg_.delay_max_ms);
    d = std::max<SimTime>(1, dist(net_rng_));
  }
  auto it = cfg_.outbound_extra_ms.find(from);
  if (it != cfg_.outbound_extra_ms.end()) d += it->second;
  return d;
}

std::size_t Simulator::tx_index(const std::string& body) {
  auto [it, inserted] = body_index_.try_emplace(body, txs_.size());
  if (inserted) {
    txs_.push_back(worker::Transaction::from_body(body));
    injected_.push_back(0);
  }
  return it->second;
}

void Simulator::start() {
  if (started_) return;
  started_ = true;
  trace_.add(0, kNoReplica, trace::RunStarted{cfg_.n, cfg_.f, cfg_.gamma, cfg_.faults, scenario_});

  for (const auto& d : cfg_.directives) {
    std::size_t idx = tx_index(d.body);
    if (d.targets.empty()) {
      for (auto& rep : replicas_) rep->directives[d.round].push_back(idx);
    } else {
      for (ReplicaId t : d.targets) replicas_[t]->directives[d.round].push_back(idx);
    }
  }
  const Workload& w = cfg_.workload;
  for (std::uint32_t k = 0; k < w.tx_count; ++k) {
    Event e;
    e.t = w.start_ms + static_cast<SimTime>(std::llround(k * w.interval_ms));
    e.kind = Kind::kInject;
    e.tx = tx_index(w.prefix + "-" + std::to_string(k));
    push(std::move(e));
  }
  total_tx_ = txs_.size();

  for (ReplicaId i = 0; i < cfg_.n; ++i) {
    dag::Vertex v;
    v.author = i;
    v.round = 0;
    v.batch.author = i;
    Digest vd = dag::vertex_digest(v);
    dag_.add_vertex(std::move(v));
    std::vector<ReplicaId> all(cfg_.n);
    for (ReplicaId j = 0; j < cfg_.n; ++j) all[j] = j;
    trace_.add(0, i, trace::VertexCreated{0, {}, 0, 0, 0});
    dag_.add_certificate({i, 0, vd, all, 0});
    trace_.add(0, i, trace::CertificateFormed{0, cfg_.n});
  }
  for (auto& rep : replicas_)
    for (ReplicaId j = 0; j < cfg_.n; ++j) rep->held_at(0).insert(j);
  for (ReplicaId i = 0; i < cfg_.n; ++i) check_propose(i, 1);
}

bool Simulator::step() {
  if (queue_.empty()) return false;
  Event e = queue_.top();
  queue_.pop();
  now_ = e.t;
  switch (e.kind) {
    case Kind::kInject:
      on_inject(e);
      break;
    case Kind::kClientTx:
      on_client_tx(e.to, e.tx, e.t);
      break;
    case Kind::kProposeTimer:
      replicas_[e.to]->timer_fired.insert(e.round);
      check_propose(e.to, e.round);
      break;
    case Kind::kBatchArrive:
      on_batch_arrive(e);
      break;
    case Kind::kCertForm:
      on_cert_form(e);
      break;
    case Kind::kCertArrive:
      on_cert_arrive(e);
      break;
    case Kind::kFairPropose:
      on_fair_propose(e);
      break;
  }
  return true;
}

void Simulator::on_inject(const Event& e) {
  if (!injected_[e.tx]) {
    injected_[e.tx] = 1;
    injected_order_.push_back(txs_[e.tx].digest);
    trace_.add(now_, kNoReplica, trace::TxInjected{txs_[e.tx].digest, txs_[e.tx].body});
  }
  std::uniform_int_distribution<SimTime> jitter(0, cfg_.workload.jitter_ms);
  for (ReplicaId j = 0; j < cfg_.n; ++j) {
    Event c;
    c.t = now_ + jitter(client_rng_);
    c.kind = Kind::kClientTx;
    c.to = j;
    c.tx = e.tx;
    push(std::move(c));
  }
}

void Simulator::on_client_tx(ReplicaId to, std::size_t tx, SimTime now) {
  if (!injected_[tx]) {
    injected_[tx] = 1;
    injected_order_.push_back(txs_[tx].digest);
    trace_.add(now, kNoReplica, trace::TxInjected{txs_[tx].digest, txs_[tx].body});
  }
  Replica& rep = *replicas_[to];
  if (rep.crashed) return;
  auto [loi, first] = rep.worker.on_client_tx(txs_[tx]);
  if (first) trace_.add(now, to, trace::TxReceived{txs_[tx].digest, loi, true});
  record_votes(to);
}

void Simulator::record_votes(ReplicaId i) {
  for (auto& v : replicas_[i]->worker.take_new_votes())
    trace_.add(now_, i, trace::VoteCast{v.target, std::move(v.edges)});
}

void Simulator::check_propose(ReplicaId i, Round round) {
  Replica& rep = *replicas_[i];
  if (rep.crashed || round != rep.last_proposed + 1 || round > cfg_.max_rounds) return;
  const auto& held = rep.held_at(round - 1);
  if (cfg_.self_reference && !held.contains(i)) return;
  if (held.size() < th_.quorum) return;
  if (held.size() == cfg_.n || rep.timer_fired.contains(round)) {
    propose(i, round);
    return;
  }
  if (!rep.timer_armed.insert(round).second) return;
  Event e;
  e.t = now_ + cfg_.parent_wait_ms;
  e.kind = Kind::kProposeTimer;
  e.to = i;
  e.round = round;
  push(std::move(e));
}

void Simulator::propose(ReplicaId i, Round round) {
  Replica& rep = *replicas_[i];
  auto fault = cfg_.fault_of(i);
  if (fault && round >= fault->activation_round) {
    if (fault->strategy == FaultStrategy::kSilentCrash) {
      rep.crashed = true;
      return;
    }
    rep.worker.set_reversing(true);
  }

  auto dit = rep.directives.find(round);
  if (dit != rep.directives.end()) {
    for (std::size_t tx : dit->second) on_client_tx(i, tx, now_);
  }

  // Entries of an own vertex nobody referenced go back into the next batch.
  if (rep.correct && round >= 2) {
    for (Round r = std::max<Round>(rep.orphan_scan, 1); r + 2 <= round; ++r) {
      const dag::Vertex* v = dag_.vertex(i, r);
      if (v && !dag_.is_referenced({i, r}) && !dag_.is_committed({i, r})) {
        auto entries = v->batch.contribution();
        if (!entries.empty()) rep.worker.reinject(entries);
      }
      rep.orphan_scan = r + 1;
    }
  }

  worker::Batch batch = rep.worker.build_batch(cfg_.batch_max_entries);
  record_votes(i);

  std::vector<ReplicaId> parents(rep.held_at(round - 1).begin(), rep.held_at(round - 1).end());
  if (!cfg_.self_reference && parents.size() > th_.quorum)
    std::erase(parents, i);

  dag::Vertex v;
  v.author = i;
  v.round = round;
  v.parents = parents;
  v.batch = batch;
  v.created_at = now_;
  trace_.add(now_, i,
             trace::VertexCreated{round, parents, batch.direct_entries.size(),
                                  batch.indirect_entries.size(), batch.votes.size()});
  dag_.add_vertex(std::move(v));
  rep.last_proposed = round;

  auto shared = std::make_shared<const worker::Batch>(std::move(batch));
  std::vector<std::pair<SimTime, ReplicaId>> acks{{now_, i}};
  for (ReplicaId j = 0; j < cfg_.n; ++j) {
    if (j == i || !live(j)) continue;
    SimTime arrive = now_ + delay(i);
    Event e;
    e.t = arrive;
    e.kind = Kind::kBatchArrive;
    e.to = j;
    e.author = i;
    e.round = round;
    e.batch = shared;
    push(std::move(e));
    acks.emplace_back(arrive + delay(j), j);
  }
  std::sort(acks.begin(), acks.end());
  if (acks.size() < th_.quorum) return;
  Event c;
  c.t = acks[th_.quorum - 1].first;
  c.kind = Kind::kCertForm;
  c.to = i;
  c.author = i;
  c.round = round;
  for (std::size_t k = 0; k < th_.quorum; ++k) c.attestors.push_back(acks[k].second);
  std::sort(c.attestors.begin(), c.attestors.end());
  push(std::move(c));
}

void Simulator::on_cert_form(const Event& e) {
  const dag::Vertex* v = dag_.vertex(e.author, e.round);
  dag_.add_certificate({e.author, e.round, dag::vertex_digest(*v), e.attestors, now_});
  trace_.add(now_, e.author, trace::CertificateFormed{e.round, e.attestors.size()});
  for (ReplicaId j = 0; j < cfg_.n; ++j) {
    if (!live(j) && j != e.author) continue;
    Event a;
    a.t = j == e.author ? now_ : now_ + delay(e.author);
    a.kind = Kind::kCertArrive;
    a.to = j;
    a.author = e.author;
    a.round = e.round;
    push(std::move(a));
  }
  commit(dag_.try_commit(now_));
}

void Simulator::on_cert_arrive(const Event& e) {
  Replica& rep = *replicas_[e.to];
  if (rep.crashed) return;
  rep.held_at(e.round).insert(e.author);
  check_propose(e.to, e.round + 1);
}

void Simulator::on_batch_arrive(const Event& e) {
  Replica& rep = *replicas_[e.to];
  if (rep.crashed) return;
  for (const Digest& d : rep.worker.on_remote_batch(*e.batch))
    trace_.add(now_, e.to, trace::TxReceived{d, *rep.worker.tracker().lookup(d), false});
  record_votes(e.to);
}

void Simulator::on_fair_propose(const Event& e) {
  Replica& rep = *replicas_[e.to];
  if (rep.crashed) return;
  rep.worker.on_fair_propose(e.round, *e.missing);
  record_votes(e.to);
}

void Simulator::commit(const std::vector<CommittedSubdag>& subdags) {
  for (const auto& sd : subdags) {
    trace_.add(now_, sd.leader, trace::SubdagCommitted{sd});
    committed_.push_back(sd);
    for (auto& order : engine_->on_commit(sd)) {
      trace_.add(now_, observer_, trace::OrderEmitted{order, log_position_});
      log_position_ += order.digests.size();
      emitted_tx_ += order.digests.size();
      emitted_.push_back(std::move(order));
    }
  }
}

bool Simulator::done() const {
  return total_tx_ > 0 && emitted_tx_ >= total_tx_ && engine_->parked_count() == 0;
}

std::vector<std::pair<dag::Vertex, dag::Certificate>> Simulator::advance_round() {
  start();
  Round target = advanced_to_ + 1;
  auto ready = [&] {
    for (ReplicaId j = 0; j < cfg_.n; ++j)
      if (!replicas_[j]->crashed && !dag_.certificate(j, target)) return false;
    return true;
  };
  while (!ready() && step()) {
  }
  advanced_to_ = target;
  std::vector<std::pair<dag::Vertex, dag::Certificate>> out;
  for (ReplicaId j = 0; j < cfg_.n; ++j) {
    const dag::Vertex* v = dag_.vertex(j, target);
    const dag::Certificate* c = dag_.certificate(j, target);
    if (v && c) out.emplace_back(*v, *c);
  }
  return out;
}

SimResult Simulator::run() {
  start();
  while (!done() && step()) {
  }
  SimResult res;
  res.trace = trace_;
  res.committed = committed_;
  res.emitted = emitted_;
  res.injected = injected_order_;
  res.parked_at_end = engine_->parked_ids();
  res.end_time = now_;
  res.highest_round = dag_.max_round();
  res.all_emitted = emitted_tx_ >= total_tx_ && res.parked_at_end.empty();
  return res;
}

}  // namespace herring::sim
