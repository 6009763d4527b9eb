#include "herring/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace herring::baseline {

FairDagModel::FairDagModel(std::uint32_t n, std::uint32_t f, FairDagMode mode)
    : n_(n),
      mode_(mode),
      shaded_(static_cast<std::uint32_t>((n - f + 1) / 2)),
      solid_(n - f) {}

std::optional<std::size_t> FairDagModel::graph_of(const Tx& tx) const {
  auto it = graph_of_.find(tx);
  if (it == graph_of_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t FairDagModel::weight(std::size_t graph, const Tx& from, const Tx& to) const {
  const auto& w = graphs_.at(graph).weight;
  auto it = w.find({from, to});
  return it == w.end() ? 0 : it->second;
}

bool FairDagModel::has_edge(std::size_t graph, const Tx& from, const Tx& to) const {
  return graphs_.at(graph).edges.contains({from, to});
}

bool FairDagModel::is_tournament(std::size_t graph) const {
  const Graph& g = graphs_.at(graph);
  for (std::size_t i = 0; i < g.members.size(); ++i)
    for (std::size_t j = i + 1; j < g.members.size(); ++j) {
      const Tx& a = g.members[i];
      const Tx& b = g.members[j];
      if (g.edges.contains({a, b}) == g.edges.contains({b, a})) return false;
    }
  return true;
}

void FairDagModel::count(Graph& g, ReplicaId i, const Tx& a, const Tx& b) {
  const auto& oa = ois_[a][i];
  const auto& ob = ois_[b][i];
  if (!oa || !ob) return;
  auto pair = a < b ? std::pair{a, b} : std::pair{b, a};
  if (!g.counted.insert({i, pair}).second) return;
  const Tx& first = *oa < *ob ? a : b;
  const Tx& second = *oa < *ob ? b : a;
  std::uint32_t w = ++g.weight[{first, second}];
  if (w >= shaded_ && !g.edges.contains({first, second}) && !g.edges.contains({second, first}))
    g.edges.insert({first, second});
}

std::vector<std::size_t> FairDagModel::on_subdag(const ModelSubdag& subdag) {
  ++subdags_;
  for (const auto& v : subdag)
    for (const auto& [tx, loi] : v.entries) {
      auto& slots = ois_[tx];
      if (slots.empty()) slots.resize(n_);
      if (!slots[v.author]) slots[v.author] = loi;
    }

  // Classification: non-blank nodes enter this subdag's graph.
  std::optional<std::size_t> current;
  for (const auto& v : subdag)
    for (const auto& [tx, loi] : v.entries) {
      if (graph_of_.contains(tx)) continue;
      const auto& slots = ois_[tx];
      auto ap = static_cast<std::uint32_t>(std::count_if(
          slots.begin(), slots.end(), [](const auto& s) { return s.has_value(); }));
      if (ap < shaded_) continue;
      if (!current) {
        current = graphs_.size();
        graphs_.emplace_back();
      }
      Graph& g = graphs_[*current];
      if (mode_ == FairDagMode::kPatched)
        for (const Tx& other : g.members)
          for (ReplicaId i = 0; i < n_; ++i) count(g, i, tx, other);
      g.members.push_back(tx);
      graph_of_[tx] = *current;
    }

  // Weight loop: only indicators carried by this subdag's vertices.
  for (const auto& v : subdag)
    for (const auto& [tx, loi] : v.entries) {
      auto it = graph_of_.find(tx);
      if (it == graph_of_.end()) continue;
      Graph& g = graphs_[it->second];
      for (const Tx& other : g.members)
        if (other != tx) count(g, v.author, tx, other);
    }

  std::vector<std::size_t> done;
  while (executed_ < graphs_.size() && is_tournament(executed_)) done.push_back(executed_++);
  return done;
}

FairDagOutcome run_fairdag_attack(FairDagMode mode, std::size_t horizon) {
  FairDagModel m(4, 1, mode);
  // R4 (id 3) is crashed and never contributes.
  m.on_subdag({{0, {{"x", 1}}}, {1, {{"x", 1}}}, {2, {{"a", 1}, {"b", 2}}}});
  m.on_subdag({{0, {{"a", 1}, {"b", 2}}}, {1, {{"b", 1}, {"a", 2}}}, {2, {{"y", 1}}}});
  FairDagOutcome out;
  auto g = m.graph_of("a");
  out.weight_ab = g ? m.weight(*g, "a", "b") : 0;
  out.weight_ba = g ? m.weight(*g, "b", "a") : 0;
  out.edge_added = g && (m.has_edge(*g, "a", "b") || m.has_edge(*g, "b", "a"));
  std::size_t rounds = 2;
  for (; rounds < horizon && !(g && m.executed() > *g); ++rounds) {
    Tx filler = "z" + std::to_string(rounds);
    Loi loi = rounds + 1;
    m.on_subdag({{0, {{filler, loi}}}, {1, {{filler, loi}}}, {2, {{filler, loi}}}});
  }
  out.rounds = rounds;
  out.finalized = g && m.executed() > *g;
  out.executed = m.executed();
  return out;
}

DodModel::DodModel(std::uint32_t n, std::uint32_t f, double gamma, DodMode mode)
    : n_(n), f_(f), tau_(ceil_count(n * (1.0 - gamma) + f + 1)), mode_(mode) {}

void DodModel::local_order(ReplicaId replica, Round round, std::vector<Tx> order) {
  local_[{replica, round}] = std::move(order);
}

std::uint32_t DodModel::w(const Tx& from, const Tx& to) const {
  auto it = mw_.find(key(from, to));
  if (it == mw_.end()) return 0;
  return from < to ? it->second.first : it->second.second;
}

bool DodModel::is_missing(const Tx& a, const Tx& b) const { return mw_.contains(key(a, b)); }

bool DodModel::resolved(const Tx& a, const Tx& b) const { return resolved_.contains(key(a, b)); }

void DodModel::arrival(const Tx& tx) {
  // Arrival of t bumps w(t', t) for every tracked pair containing t.
  for (auto& [k, wt] : mw_) {
    if (resolved_.contains(k)) continue;
    if (k.first == tx) ++wt.second;
    if (k.second == tx) ++wt.first;
  }
}

void DodModel::global_order(Round round, const std::vector<ReplicaId>& quorum) {
  std::map<Tx, std::uint32_t> support;
  std::vector<const std::vector<Tx>*> lists;
  for (ReplicaId r : quorum) {
    auto it = local_.find({r, round});
    if (it == local_.end()) continue;
    lists.push_back(&it->second);
    for (const auto& tx : it->second) ++support[tx];
  }
  std::vector<Tx> nodes;
  for (const auto& [tx, c] : support)
    if (c >= tau_) nodes.push_back(tx);

  Pending p{round, {}};
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const Tx& a = nodes[i];
      const Tx& b = nodes[j];
      std::uint32_t ab = 0, ba = 0;
      for (const auto* l : lists) {
        auto pa = std::find(l->begin(), l->end(), a);
        auto pb = std::find(l->begin(), l->end(), b);
        if (pa == l->end() || pb == l->end()) continue;
        (pa < pb ? ab : ba)++;
      }
      auto k = key(a, b);
      auto it = mw_.find(k);
      if (it != mw_.end()) {
        // Co-appearance in a later round's graph boosts the stored weights.
        if (!resolved_.contains(k)) {
          it->second.first += ab;
          it->second.second += ba;
        }
        continue;
      }
      if (std::max(ab, ba) >= tau_ && ab != ba) continue;
      mw_[k] = {ab, ba};
      p.missing.push_back(k);
    }
  queue_.push_back(std::move(p));
}

void DodModel::explicit_vote(ReplicaId voter, const Tx& from, const Tx& to) {
  if (mode_ != DodMode::kExplicitPatch) return;
  auto k = key(from, to);
  if (!mw_.contains(k) || resolved_.contains(k)) return;
  auto& vs = voters_[k];
  if (!vs.insert(voter).second) return;
  // Explicit resolutions are tallied on their own, next to the frozen weights.
  auto& t = tally_[k];
  (from < to ? t.first : t.second)++;
  if (vs.size() >= n_ - f_ && std::max(t.first, t.second) >= tau_) resolved_.insert(k);
}

std::size_t DodModel::drain() {
  std::size_t k = 0;
  while (!queue_.empty()) {
    const auto& head = queue_.front();
    bool ready = std::all_of(head.missing.begin(), head.missing.end(), [&](const auto& pr) {
      if (resolved_.contains(pr)) return true;
      const auto& wt = mw_.at(pr);
      return std::max(wt.first, wt.second) >= tau_ && wt.first != wt.second;
    });
    if (!ready) break;
    queue_.erase(queue_.begin());
    ++executed_;
    ++k;
  }
  return k;
}

DodOutcome run_dod_scenario(DodMode mode, std::size_t extra_rounds) {
  DodModel m(5, 1, 1.0, mode);
  const std::vector<ReplicaId> quorum{0, 1, 2, 3};  // R5 crashed
  // Round 1 is r-1 and round 2 is r of the table.
  m.local_order(0, 1, {"p"});
  m.local_order(1, 1, {"p", "a"});
  m.local_order(2, 1, {"p", "b"});
  m.local_order(3, 1, {"p"});
  m.local_order(0, 2, {"a", "b"});
  m.local_order(1, 2, {"b"});
  m.local_order(2, 2, {"a"});
  m.local_order(3, 2, {"b", "a"});
  m.global_order(1, quorum);
  m.global_order(2, quorum);
  m.drain();

  // Each replica's full receive order, used for explicit resolution.
  const std::vector<std::vector<Tx>> history{
      {"p", "a", "b"}, {"p", "a", "b"}, {"p", "b", "a"}, {"p", "b", "a"}};
  for (ReplicaId r = 0; r < 4; ++r) {
    const auto& h = history[r];
    bool a_first = std::find(h.begin(), h.end(), "a") < std::find(h.begin(), h.end(), "b");
    m.explicit_vote(r, a_first ? "a" : "b", a_first ? "b" : "a");
  }

  bool reached = std::max(m.w("a", "b"), m.w("b", "a")) >= m.edge_threshold();
  for (std::size_t k = 0; k < extra_rounds; ++k) {
    Round round = 3 + k;
    Tx filler = "q" + std::to_string(k);
    for (ReplicaId r : quorum) m.local_order(r, round, {filler});
    m.arrival(filler);
    m.global_order(round, quorum);
    m.drain();
    reached = reached || std::max(m.w("a", "b"), m.w("b", "a")) >= m.edge_threshold();
  }

  DodOutcome out;
  out.w_ab = m.w("a", "b");
  out.w_ba = m.w("b", "a");
  out.threshold = m.edge_threshold();
  out.reached_threshold = reached;
  out.executed = m.executed();
  out.queued = m.queued();
  out.queue_stalled = m.queued() > 0;
  return out;
}

namespace {

std::uint32_t count_before(const std::vector<std::vector<Tx>>& orders,
                           const std::vector<ReplicaId>& quorum, const Tx& a, const Tx& b) {
  std::uint32_t k = 0;
  for (ReplicaId r : quorum) {
    const auto& l = orders[r];
    auto pa = std::find(l.begin(), l.end(), a);
    auto pb = std::find(l.begin(), l.end(), b);
    if (pa != l.end() && pb != l.end() && pa < pb) ++k;
  }
  return k;
}

}  // namespace

DivergenceVignette weight_divergence_vignette() {
  // N = 9, f = 2, gamma = 1: edge threshold 3. Quorums differ in one member.
  std::vector<std::vector<Tx>> orders{{"a", "b"}, {"a", "b"}, {"b", "a"}, {"a"}, {"a"},
                                      {"a"},      {"a"},      {"a"},      {}};
  std::vector<ReplicaId> q1{0, 1, 2, 3, 4, 5, 6};
  std::vector<ReplicaId> q2{1, 2, 3, 4, 5, 6, 7};
  DivergenceVignette v;
  v.first_stored = count_before(orders, q1, "a", "b");
  v.second_stored = count_before(orders, q2, "a", "b");
  // Each receives the other's bare pair and adds one.
  v.first_after = v.first_stored + 1;
  v.second_after = v.second_stored + 1;
  return v;
}

InflationVignette weight_inflation_vignette(std::uint32_t n, std::uint32_t f) {
  InflationVignette v;
  v.threshold = ceil_count(f + 1.0);
  // One honest local order has a before b; the pair stays missing.
  v.evidence = 1;
  v.after = v.evidence;
  for (std::uint32_t copy = 0; copy < n - f; ++copy) ++v.after;
  return v;
}

}  // namespace herring::baseline
