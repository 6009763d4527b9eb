#include "herring/fairness_graph.hpp"

#include <algorithm>

namespace herring::fairness {

WeightReport phase1_weights(const Snapshot& snap, const Thresholds& th) {
  WeightReport rep;
  rep.r = snap.r;

  std::unordered_map<Digest, std::uint32_t, DigestHash> count;
  for (const auto& [replica, list] : snap.lists)
    for (const Digest& d : list) ++count[d];
  rep.support.assign(count.begin(), count.end());
  std::sort(rep.support.begin(), rep.support.end());

  std::unordered_map<Digest, std::uint32_t, DigestHash> index;
  for (const auto& [d, c] : rep.support) {
    if (c < th.tau) continue;
    index.emplace(d, static_cast<std::uint32_t>(rep.admitted.size()));
    rep.admitted.push_back(d);
    rep.solid.push_back(c >= th.tau_solid ? 1 : 0);
  }

  const std::size_t m = rep.admitted.size();
  rep.weight.assign(m * m, 0);
  // u precedes v in L_i when u comes first, or when L_i lists u but not v.
  std::vector<std::uint32_t> seq;
  std::vector<char> listed(m, 0);
  for (const auto& [replica, list] : snap.lists) {
    seq.clear();
    for (const Digest& d : list) {
      auto it = index.find(d);
      if (it != index.end()) seq.push_back(it->second);
    }
    for (std::uint32_t u : seq) listed[u] = 1;
    for (std::size_t a = 0; a < seq.size(); ++a) {
      std::uint32_t* row = &rep.weight[seq[a] * m];
      for (std::size_t v = 0; v < m; ++v) row[v] += listed[v] ^ 1;
      for (std::size_t b = a + 1; b < seq.size(); ++b) ++row[seq[b]];
    }
    for (std::uint32_t u : seq) listed[u] = 0;
  }
  return rep;
}

ChainToken empty_chain() { return std::make_shared<const DigestSet>(); }

bool DepGraph::has_edge(std::uint32_t u, std::uint32_t v) const {
  return std::binary_search(out[u].begin(), out[u].end(), v);
}

std::vector<TxPair> DepGraph::missing_pairs() const {
  std::vector<TxPair> pairs;
  pairs.reserve(missing.size());
  for (auto [u, v] : missing) pairs.push_back(TxPair::make(vertices[u], vertices[v]));
  return pairs;
}

std::size_t DepGraph::edge_count() const {
  std::size_t k = 0;
  for (const auto& o : out) k += o.size();
  return k;
}

std::optional<std::uint32_t> DepGraph::index_of(const Digest& d) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), d);
  if (it == vertices.end() || *it != d) return std::nullopt;
  return static_cast<std::uint32_t>(it - vertices.begin());
}

DepGraph phase2_build_graph(const WeightReport& report, const DigestSet& prior_chain,
                            std::uint32_t tau) {
  DepGraph g;
  g.r = report.r;
  std::vector<std::uint32_t> keep;
  for (std::uint32_t i = 0; i < report.admitted.size(); ++i) {
    if (prior_chain.contains(report.admitted[i])) continue;
    keep.push_back(i);
    g.vertices.push_back(report.admitted[i]);
    g.solid.push_back(report.solid[i]);
  }
  const auto m = static_cast<std::uint32_t>(keep.size());
  g.out.assign(m, {});
  for (std::uint32_t a = 0; a < m; ++a) {
    for (std::uint32_t b = a + 1; b < m; ++b) {
      std::uint32_t wab = report.w(keep[a], keep[b]);
      std::uint32_t wba = report.w(keep[b], keep[a]);
      if (std::max(wab, wba) >= tau) {
        // a has the smaller digest, so ties point a -> b.
        if (wab >= wba)
          g.out[a].push_back(b);
        else
          g.out[b].push_back(a);
      } else {
        g.missing.emplace_back(a, b);
      }
    }
  }
  for (auto& o : g.out) std::sort(o.begin(), o.end());
  return g;
}

void truncate_at_anchor(DepGraph& g) {
  g.sccs = tarjan_scc(g.out);
  g.anchor.reset();
  for (std::size_t j = 0; j < g.sccs.size(); ++j)
    for (std::uint32_t v : g.sccs[j])
      if (g.solid[v]) g.anchor = j;

  std::size_t keep_sccs = g.anchor ? *g.anchor + 1 : 0;
  std::vector<std::uint32_t> kept;
  for (std::size_t j = 0; j < keep_sccs; ++j)
    kept.insert(kept.end(), g.sccs[j].begin(), g.sccs[j].end());
  std::sort(kept.begin(), kept.end());

  const std::size_t m = g.vertices.size();
  if (kept.size() == m) {
    for (auto& c : g.sccs) std::sort(c.begin(), c.end());
    return;
  }

  // remap is monotone, so compaction can run in place front to back.
  std::vector<std::uint32_t> remap(m, UINT32_MAX);
  for (std::uint32_t i = 0; i < kept.size(); ++i) remap[kept[i]] = i;
  for (std::uint32_t i = 0; i < kept.size(); ++i) {
    std::uint32_t v = kept[i];
    auto& adj = g.out[v];
    std::size_t k = 0;
    for (std::uint32_t w : adj)
      if (remap[w] != UINT32_MAX) adj[k++] = remap[w];
    adj.resize(k);
    if (i != v) {
      g.vertices[i] = g.vertices[v];
      g.solid[i] = g.solid[v];
      g.out[i] = std::move(adj);
    }
  }
  g.vertices.resize(kept.size());
  g.solid.resize(kept.size());
  g.out.resize(kept.size());
  std::size_t k = 0;
  for (auto [u, v] : g.missing)
    if (remap[u] != UINT32_MAX && remap[v] != UINT32_MAX) g.missing[k++] = {remap[u], remap[v]};
  g.missing.resize(k);
  g.sccs.resize(keep_sccs);
  for (auto& c : g.sccs) {
    for (auto& v : c) v = remap[v];
    std::sort(c.begin(), c.end());
  }
}

ChainToken extend_chain(const ChainToken& prior_chain, const DepGraph& g) {
  if (g.vertices.empty()) return prior_chain;
  auto next = std::make_shared<DigestSet>(*prior_chain);
  next->insert(g.vertices.begin(), g.vertices.end());
  return next;
}

ChainToken phase3_anchor(DepGraph& g, const ChainToken& prior_chain) {
  truncate_at_anchor(g);
  return extend_chain(prior_chain, g);
}

CumulativeState::Extracted CumulativeState::extract_snapshot(const CommittedSubdag& subdag) {
  if (subdag.id != last_extracted_ + 1)
    throw ProtocolError("subdag " + std::to_string(subdag.id) + " extracted out of order; expected " +
                        std::to_string(last_extracted_ + 1));
  last_extracted_ = subdag.id;

  for (const auto& v : subdag.vertices) {
    auto& seen = seen_[v.author];
    auto& list = pending_[v.author];
    for (const auto& e : v.contribution) {
      if (!seen.insert(e.tx).second) continue;
      if (proposed_.contains(e.tx)) continue;
      list.push_back(e.tx);
    }
  }

  Extracted out;
  out.snapshot.r = subdag.id;
  std::unordered_map<Digest, std::uint32_t, DigestHash> count;
  for (const auto& [replica, list] : pending_) {
    std::vector<Digest> l;
    l.reserve(list.size());
    for (const Digest& d : list)
      if (!claimed_.contains(d)) l.push_back(d);
    if (l.empty()) continue;
    for (const Digest& d : l) ++count[d];
    out.snapshot.lists.emplace_back(replica, std::move(l));
  }
  for (const auto& [d, c] : count)
    if (c >= th_.tau_solid) out.claim.push_back(d);
  std::sort(out.claim.begin(), out.claim.end());
  for (const Digest& d : out.claim) ++claimed_[d];
  claims_[subdag.id] = out.claim;
  return out;
}

void CumulativeState::apply_result(SubdagId r, const std::vector<Digest>& retained) {
  if (r == 0 || r > last_extracted_) throw ProtocolError("result for a subdag never extracted");
  if (!applied_.insert(r).second)
    throw ProtocolError("result for subdag " + std::to_string(r) + " applied twice");
  if (!retained.empty()) {
    proposed_.insert(retained.begin(), retained.end());
    for (auto& [replica, list] : pending_)
      std::erase_if(list, [&](const Digest& d) { return proposed_.contains(d); });
  }
  auto it = claims_.find(r);
  if (it != claims_.end()) {
    for (const Digest& d : it->second)
      if (--claimed_[d] == 0) claimed_.erase(d);
    claims_.erase(it);
  }
}

std::size_t CumulativeState::pending_size(ReplicaId i) const {
  auto it = pending_.find(i);
  return it == pending_.end() ? 0 : it->second.size();
}

const std::vector<Digest>* CumulativeState::pending(ReplicaId i) const {
  auto it = pending_.find(i);
  return it == pending_.end() ? nullptr : &it->second;
}

}  // namespace herring::fairness
