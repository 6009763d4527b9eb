#include "herring/fairness_finalize.hpp"

#include <algorithm>

namespace herring::fairness {

FinalOrder finalize(const DepGraph& g) {
  if (!g.missing.empty()) throw ProtocolError("finalize called with unresolved pairs");
  FinalOrder out;
  out.r = g.r;
  for (const auto& scc : tarjan_scc(g.out)) {
    std::vector<Digest> batch;
    for (std::uint32_t v : scc) batch.push_back(g.vertices[v]);
    std::sort(batch.begin(), batch.end());
    out.digests.insert(out.digests.end(), batch.begin(), batch.end());
    out.batch_sizes.push_back(static_cast<std::uint32_t>(batch.size()));
  }
  return out;
}

void FinalizationStore::park(DepGraph graph) {
  SubdagId r = graph.r;
  if (ready_.contains(r) || r < next_) throw ProtocolError("parking a finalized subdag");
  if (!parked_.emplace(r, std::move(graph)).second) throw ProtocolError("subdag parked twice");
}

void FinalizationStore::set_ready(FinalOrder order) {
  if (parked_.contains(order.r)) throw ProtocolError("ready order for a parked subdag");
  if (order.r < next_ || !ready_.emplace(order.r, std::move(order)).second)
    throw ProtocolError("subdag finalized twice");
}

std::set<SubdagId> FinalizationStore::route_votes(SubdagId commit_seq,
                                                  const std::vector<worker::FairUpdateVote>& votes,
                                                  SubdagId last_extracted) {
  std::set<SubdagId> touched;
  for (const auto& v : votes) {
    if (v.target == 0 || v.target > last_extracted || is_finalized(v.target)) continue;
    if (!authors_[v.target].insert(v.author).second) continue;
    votes_[v.target].push_back({commit_seq, v.author, v.edges});
    touched.insert(v.target);
  }
  std::set<SubdagId> out;
  for (SubdagId r : touched)
    if (parked_.contains(r) && authors_[r].size() >= th_.vote_quorum) out.insert(r);
  return out;
}

std::optional<FinalOrder> FinalizationStore::try_resolve(SubdagId r) {
  auto pit = parked_.find(r);
  if (pit == parked_.end()) return std::nullopt;
  auto vit = votes_.find(r);
  if (vit == votes_.end()) return std::nullopt;
  const DepGraph& g = pit->second;
  const auto& records = vit->second;

  std::map<std::pair<std::uint32_t, std::uint32_t>, PairTally> tallies;
  for (auto p : g.missing) tallies[p];

  std::size_t authors = 0;
  for (std::size_t i = 0; i < records.size();) {
    // Take every vote of the next committed subdag as one step.
    SubdagId seq = records[i].commit_seq;
    for (; i < records.size() && records[i].commit_seq == seq; ++i) {
      ++authors;
      std::set<std::pair<std::uint32_t, std::uint32_t>> counted;
      for (const auto& e : records[i].edges) {
        auto u = g.index_of(e.from);
        auto v = g.index_of(e.to);
        if (!u || !v) continue;
        auto key = std::minmax(*u, *v);
        auto t = tallies.find({key.first, key.second});
        if (t == tallies.end() || !counted.insert(t->first).second) continue;
        if (*u < *v)
          ++t->second.forward;
        else
          ++t->second.backward;
      }
    }
    if (authors < th_.vote_quorum) continue;
    bool decided = std::all_of(tallies.begin(), tallies.end(), [&](const auto& kv) {
      return std::max(kv.second.forward, kv.second.backward) >= th_.tau;
    });
    if (!decided) continue;

    DepGraph aug = std::move(pit->second);
    parked_.erase(pit);
    for (const auto& [p, t] : tallies) {
      // forward is smaller-digest -> larger-digest, so ties go forward.
      if (t.forward >= t.backward)
        aug.out[p.first].push_back(p.second);
      else
        aug.out[p.second].push_back(p.first);
    }
    for (auto& o : aug.out) std::sort(o.begin(), o.end());
    aug.missing.clear();
    votes_.erase(r);
    authors_.erase(r);
    stuck_.erase(r);
    FinalOrder order = finalize(aug);
    return order;
  }
  if (authors >= th_.n) stuck_.insert(r);
  return std::nullopt;
}

std::vector<FinalOrder> FinalizationStore::emit() {
  std::vector<FinalOrder> out;
  for (auto it = ready_.find(next_); it != ready_.end(); it = ready_.find(next_)) {
    out.push_back(std::move(it->second));
    ready_.erase(it);
    ++next_;
  }
  return out;
}

std::set<SubdagId> FinalizationStore::parked_ids() const {
  std::set<SubdagId> ids;
  for (const auto& [r, g] : parked_) ids.insert(r);
  return ids;
}

std::size_t FinalizationStore::distinct_authors(SubdagId r) const {
  auto it = authors_.find(r);
  return it == authors_.end() ? 0 : it->second.size();
}

std::optional<PairTally> FinalizationStore::tally(SubdagId r, const TxPair& pair) const {
  auto pit = parked_.find(r);
  if (pit == parked_.end()) return std::nullopt;
  auto u = pit->second.index_of(pair.first);
  auto v = pit->second.index_of(pair.second);
  if (!u || !v) return std::nullopt;
  PairTally t;
  auto vit = votes_.find(r);
  if (vit == votes_.end()) return t;
  for (const auto& rec : vit->second)
    for (const auto& e : rec.edges) {
      if (e.from == pair.first && e.to == pair.second) ++t.forward;
      if (e.from == pair.second && e.to == pair.first) ++t.backward;
    }
  return t;
}

}  // namespace herring::fairness
