#include "herring/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

namespace herring::oracle {

namespace {

using Index = std::map<Digest, std::size_t>;

// Reachability-based condensation: components ordered by repeatedly taking the
// source component with the smallest member.
std::vector<std::vector<std::size_t>> condensation(std::size_t m,
                                                   const std::vector<std::vector<char>>& edge) {
  std::vector<std::vector<char>> reach(m, std::vector<char>(m, 0));
  for (std::size_t s = 0; s < m; ++s) {
    std::vector<std::size_t> todo{s};
    reach[s][s] = 1;
    while (!todo.empty()) {
      std::size_t u = todo.back();
      todo.pop_back();
      for (std::size_t v = 0; v < m; ++v)
        if (edge[u][v] && !reach[s][v]) {
          reach[s][v] = 1;
          todo.push_back(v);
        }
    }
  }
  std::vector<int> comp(m, -1);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t u = 0; u < m; ++u) {
    if (comp[u] >= 0) continue;
    std::vector<std::size_t> c;
    for (std::size_t v = u; v < m; ++v)
      if (reach[u][v] && reach[v][u]) {
        comp[v] = static_cast<int>(comps.size());
        c.push_back(v);
      }
    comps.push_back(std::move(c));
  }
  std::vector<std::vector<std::size_t>> ordered;
  std::vector<char> taken(comps.size(), 0);
  for (std::size_t round = 0; round < comps.size(); ++round) {
    std::size_t best = comps.size();
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (taken[c]) continue;
      bool source = true;
      for (std::size_t d = 0; d < comps.size() && source; ++d) {
        if (d == c || taken[d]) continue;
        if (reach[comps[d][0]][comps[c][0]]) source = false;
      }
      if (source && (best == comps.size() || comps[c][0] < comps[best][0])) best = c;
    }
    taken[best] = 1;
    ordered.push_back(comps[best]);
  }
  return ordered;
}

fairness::FinalOrder linearize(SubdagId r, const std::vector<Digest>& vs,
                               const std::vector<std::vector<char>>& edge) {
  fairness::FinalOrder out;
  out.r = r;
  for (const auto& c : condensation(vs.size(), edge)) {
    std::vector<Digest> batch;
    for (std::size_t i : c) batch.push_back(vs[i]);
    std::sort(batch.begin(), batch.end());
    out.digests.insert(out.digests.end(), batch.begin(), batch.end());
    out.batch_sizes.push_back(static_cast<std::uint32_t>(batch.size()));
  }
  return out;
}

struct Parked {
  std::vector<Digest> vertices;
  std::vector<std::vector<char>> edge;
  std::vector<std::pair<std::size_t, std::size_t>> missing;
};

}  // namespace

SerialReference serial_reference(const std::vector<CommittedSubdag>& committed,
                                 const Thresholds& th) {
  SerialReference ref;
  std::map<ReplicaId, std::vector<Digest>> pending;
  std::map<ReplicaId, std::set<Digest>> seen;
  std::set<Digest> proposed;
  std::map<SubdagId, Parked> parked;
  std::map<SubdagId, fairness::FinalOrder> finals;

  for (const auto& sd : committed) {
    for (const auto& v : sd.vertices)
      for (const auto& e : v.contribution) {
        if (proposed.contains(e.tx) || !seen[v.author].insert(e.tx).second) continue;
        pending[v.author].push_back(e.tx);
      }

    std::map<Digest, std::uint32_t> support;
    for (const auto& [rep, list] : pending)
      for (const auto& d : list) ++support[d];
    std::vector<Digest> vs;
    std::vector<char> solid;
    for (const auto& [d, c] : support)
      if (c >= th.tau) {
        vs.push_back(d);
        solid.push_back(c >= th.tau_solid);
      }
    const std::size_t m = vs.size();

    RefGraph g;
    g.r = sd.id;
    g.admitted = vs;
    g.weight.assign(m * m, 0);
    for (const auto& [rep, list] : pending) {
      std::map<Digest, std::size_t> pos;
      for (std::size_t k = 0; k < list.size(); ++k) pos.emplace(list[k], k);
      for (std::size_t u = 0; u < m; ++u)
        for (std::size_t v = 0; v < m; ++v) {
          if (u == v) continue;
          auto pu = pos.find(vs[u]);
          auto pv = pos.find(vs[v]);
          // A listed transaction precedes one the list does not hold.
          if (pu != pos.end() && (pv == pos.end() || pu->second < pv->second)) ++g.weight[u * m + v];
        }
    }

    std::vector<std::vector<char>> edge(m, std::vector<char>(m, 0));
    std::vector<std::pair<std::size_t, std::size_t>> missing;
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = u + 1; v < m; ++v) {
        std::uint32_t a = g.w(u, v), b = g.w(v, u);
        if (std::max(a, b) < th.tau)
          missing.emplace_back(u, v);
        else if (a >= b)
          edge[u][v] = 1;
        else
          edge[v][u] = 1;
      }

    // Anchor: last component holding a solid transaction.
    auto comps = condensation(m, edge);
    std::optional<std::size_t> anchor;
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (std::size_t u : comps[c])
        if (solid[u]) anchor = c;
    std::vector<char> keep(m, 0);
    if (anchor)
      for (std::size_t c = 0; c <= *anchor; ++c)
        for (std::size_t u : comps[c]) keep[u] = 1;

    Parked p;
    std::vector<std::size_t> remap(m, m);
    for (std::size_t u = 0; u < m; ++u)
      if (keep[u]) {
        remap[u] = p.vertices.size();
        p.vertices.push_back(vs[u]);
      }
    const std::size_t k = p.vertices.size();
    p.edge.assign(k, std::vector<char>(k, 0));
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = 0; v < m; ++v)
        if (keep[u] && keep[v] && edge[u][v]) p.edge[remap[u]][remap[v]] = 1;
    for (auto [u, v] : missing)
      if (keep[u] && keep[v]) p.missing.emplace_back(remap[u], remap[v]);

    g.retained = p.vertices;
    g.missing = p.missing.size();
    g.parked = !p.missing.empty();
    for (const auto& d : p.vertices) proposed.insert(d);
    for (auto& [rep, list] : pending)
      std::erase_if(list, [&](const Digest& d) { return proposed.contains(d); });

    if (p.missing.empty())
      finals.emplace(sd.id, linearize(sd.id, p.vertices, p.edge));
    else
      parked.emplace(sd.id, std::move(p));
    ref.graphs.push_back(std::move(g));
  }

  // Votes, in commit order; the first vote per author and target counts.
  struct Ballot {
    SubdagId seq;
    const worker::FairUpdateVote* vote;
  };
  std::map<SubdagId, std::vector<Ballot>> ballots;
  std::map<SubdagId, std::set<ReplicaId>> voted;
  for (const auto& sd : committed)
    for (const auto& v : sd.vertices)
      for (const auto& vote : v.votes) {
        if (vote.target == 0 || vote.target > sd.id) continue;
        if (!voted[vote.target].insert(vote.author).second) continue;
        ballots[vote.target].push_back({sd.id, &vote});
      }

  for (auto& [r, p] : parked) {
    const auto& list = ballots[r];
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::uint32_t, std::uint32_t>> tally;
    for (auto mp : p.missing) tally[mp];
    std::set<ReplicaId> authors;
    bool done = false;
    for (std::size_t i = 0; i < list.size() && !done;) {
      SubdagId seq = list[i].seq;
      for (; i < list.size() && list[i].seq == seq; ++i) {
        authors.insert(list[i].vote->author);
        std::set<std::pair<std::size_t, std::size_t>> once;
        for (const auto& e : list[i].vote->edges) {
          auto fu = std::lower_bound(p.vertices.begin(), p.vertices.end(), e.from);
          auto fv = std::lower_bound(p.vertices.begin(), p.vertices.end(), e.to);
          if (fu == p.vertices.end() || *fu != e.from || fv == p.vertices.end() || *fv != e.to)
            continue;
          std::size_t u = fu - p.vertices.begin(), v = fv - p.vertices.begin();
          std::pair<std::size_t, std::size_t> key{std::min(u, v), std::max(u, v)};
          auto t = tally.find(key);
          if (t == tally.end() || !once.insert(key).second) continue;
          (u < v ? t->second.first : t->second.second)++;
        }
      }
      if (authors.size() < th.vote_quorum) continue;
      bool all = true;
      for (const auto& [key, t] : tally)
        if (std::max(t.first, t.second) < th.tau) all = false;
      if (!all) continue;
      for (const auto& [key, t] : tally) {
        if (t.first >= t.second)
          p.edge[key.first][key.second] = 1;
        else
          p.edge[key.second][key.first] = 1;
      }
      finals.emplace(r, linearize(r, p.vertices, p.edge));
      for (auto& g : ref.graphs)
        if (g.r == r) g.resolved_at = seq;
      done = true;
    }
    if (!done) ref.unresolved.insert(r);
  }

  for (SubdagId r = 1;; ++r) {
    auto it = finals.find(r);
    if (it == finals.end()) break;
    ref.orders.push_back(std::move(it->second));
  }
  return ref;
}

std::map<ReplicaId, std::vector<Digest>> receive_orders(const trace::RunTrace& trace) {
  std::map<ReplicaId, std::vector<std::pair<Loi, Digest>>> raw;
  for (const auto* e : trace.of<trace::TxReceived>()) {
    const auto& rx = std::get<trace::TxReceived>(e->payload);
    raw[e->replica].emplace_back(rx.loi, rx.tx);
  }
  std::map<ReplicaId, std::vector<Digest>> out;
  for (auto& [rep, list] : raw) {
    std::sort(list.begin(), list.end());
    auto& o = out[rep];
    for (const auto& [loi, d] : list) o.push_back(d);
  }
  return out;
}

namespace {

// Global batch number of every emitted digest.
std::unordered_map<Digest, std::size_t, DigestHash> batch_index(
    const std::vector<fairness::FinalOrder>& emitted) {
  std::unordered_map<Digest, std::size_t, DigestHash> at;
  std::size_t batch = 0;
  for (const auto& o : emitted) {
    std::size_t k = 0;
    for (std::uint32_t size : o.batch_sizes) {
      for (std::uint32_t j = 0; j < size; ++j) at.emplace(o.digests[k++], batch);
      ++batch;
    }
  }
  return at;
}

struct Positions {
  std::vector<Digest> txs;
  // pos[replica][tx], -1 when the replica never had it
  std::vector<std::vector<long>> pos;
};

Positions positions(const std::vector<std::vector<Digest>>& orders) {
  Positions p;
  std::map<Digest, std::size_t> idx;
  for (const auto& o : orders)
    for (const auto& d : o) idx.emplace(d, 0);
  for (auto& [d, i] : idx) {
    i = p.txs.size();
    p.txs.push_back(d);
  }
  for (const auto& o : orders) {
    std::vector<long> row(p.txs.size(), -1);
    for (std::size_t k = 0; k < o.size(); ++k)
      if (row[idx[o[k]]] < 0) row[idx[o[k]]] = static_cast<long>(k);
    p.pos.push_back(std::move(row));
  }
  return p;
}

}  // namespace

BatchOfReport check_batch_of(const trace::RunTrace& trace,
                             const std::vector<fairness::FinalOrder>& emitted, double gamma) {
  BatchOfReport rep;
  const auto* head = trace.header();
  if (!head) return rep;
  const std::uint32_t n = head->n;
  auto recv = receive_orders(trace);
  std::vector<std::vector<Digest>> orders;
  for (ReplicaId i = 0; i < n; ++i) orders.push_back(recv[i]);
  Positions p = positions(orders);
  auto at = batch_index(emitted);
  const double need = gamma * n - 1e-9;

  const std::size_t t = p.txs.size();
  for (std::size_t a = 0; a < t; ++a)
    for (std::size_t b = a + 1; b < t; ++b) {
      std::uint32_t ab = 0, ba = 0;
      bool all = true;
      for (ReplicaId i = 0; i < n && all; ++i) {
        long pa = p.pos[i][a], pb = p.pos[i][b];
        if (pa < 0 || pb < 0) {
          all = false;
          break;
        }
        (pa < pb ? ab : ba)++;
      }
      if (!all) {
        ++rep.skipped_pairs;
        continue;
      }
      ++rep.checked_pairs;
      auto judge = [&](std::size_t x, std::size_t y, std::uint32_t support) {
        if (support < need) return;
        auto bx = at.find(p.txs[x]);
        auto by = at.find(p.txs[y]);
        if (by == at.end()) return;
        if (bx != at.end() && bx->second <= by->second) return;
        FairnessViolation v;
        v.first = p.txs[x];
        v.second = p.txs[y];
        v.support = support;
        if (bx != at.end()) v.first_batch = bx->second;
        v.second_batch = by->second;
        rep.violations.push_back(v);
      };
      judge(a, b, ab);
      judge(b, a, ba);
    }
  return rep;
}

CheckResult check_single_graph(const trace::RunTrace& trace) {
  std::map<Digest, SubdagId> owner;
  for (const auto* e : trace.of<trace::GraphBuilt>()) {
    const auto& g = std::get<trace::GraphBuilt>(e->payload);
    for (const auto& d : g.retained) {
      auto [it, fresh] = owner.emplace(d, g.r);
      if (!fresh)
        return {false, d.hex() + " retained by subdags " + std::to_string(it->second) + " and " +
                           std::to_string(g.r)};
    }
  }
  return {};
}

CheckResult check_loi_monotone(const trace::RunTrace& trace) {
  const auto* head = trace.header();
  if (!head) return {};
  std::set<ReplicaId> faulty;
  for (const auto& f : head->faults) faulty.insert(f.replica);
  std::map<ReplicaId, std::pair<Loi, SubdagId>> last;
  for (const auto* e : trace.of<trace::SubdagCommitted>()) {
    const auto& sd = std::get<trace::SubdagCommitted>(e->payload).subdag;
    for (const auto& v : sd.vertices) {
      if (faulty.contains(v.author)) continue;
      for (const auto& entry : v.contribution) {
        auto it = last.find(v.author);
        if (it != last.end() && entry.loi < it->second.first)
          return {false, "replica " + std::to_string(v.author) + " reported LOI " +
                             std::to_string(entry.loi) + " in subdag " + std::to_string(sd.id) +
                             " after LOI " + std::to_string(it->second.first) + " in subdag " +
                             std::to_string(it->second.second)};
        last[v.author] = {entry.loi, sd.id};
      }
    }
  }
  return {};
}

DistReport dist_histogram(const trace::RunTrace& trace,
                          const std::vector<fairness::FinalOrder>& emitted,
                          const SerialReference* reference, const Thresholds* th) {
  DistReport rep;
  const auto* head = trace.header();
  if (!head) return rep;
  const std::uint32_t n = head->n;
  rep.n = n;
  std::set<ReplicaId> reversing;
  for (const auto& f : head->faults)
    if (f.strategy == FaultStrategy::kReverseLocalOrder) reversing.insert(f.replica);

  auto recv = receive_orders(trace);
  // Reversing replicas are judged by what they put into the DAG.
  std::map<ReplicaId, std::vector<Digest>> reported;
  for (const auto* e : trace.of<trace::SubdagCommitted>()) {
    const auto& sd = std::get<trace::SubdagCommitted>(e->payload).subdag;
    for (const auto& v : sd.vertices)
      if (reversing.contains(v.author))
        for (const auto& entry : v.contribution) reported[v.author].push_back(entry.tx);
  }
  std::vector<std::vector<Digest>> orders;
  std::vector<char> honest;
  for (ReplicaId i = 0; i < n; ++i) {
    orders.push_back(reversing.contains(i) ? reported[i] : recv[i]);
    honest.push_back(!reversing.contains(i));
  }
  Positions p = positions(orders);
  auto at = batch_index(emitted);

  // Pairs that shared a graph without the honest direction holding the edge.
  std::map<std::pair<Digest, Digest>, int> shared;  // (earlier, later) -> 1 ok, 0 broken
  auto record_graphs = [&](std::size_t a, std::size_t b) {
    const Digest& x = p.txs[a];
    const Digest& y = p.txs[b];
    int state = -1;
    for (const auto& g : reference->graphs) {
      auto ix = std::lower_bound(g.admitted.begin(), g.admitted.end(), x);
      auto iy = std::lower_bound(g.admitted.begin(), g.admitted.end(), y);
      if (ix == g.admitted.end() || *ix != x || iy == g.admitted.end() || *iy != y) continue;
      std::size_t u = ix - g.admitted.begin(), v = iy - g.admitted.begin();
      std::uint32_t wxy = g.w(u, v), wyx = g.w(v, u);
      bool holds = wxy >= th->tau && (wxy > wyx || (wxy == wyx && x < y));
      state = (state == 0 || !holds) ? 0 : 1;
    }
    return state == 1;
  };

  std::map<std::uint32_t, DistBucket> buckets;
  const std::size_t t = p.txs.size();
  for (std::size_t a = 0; a < t; ++a)
    for (std::size_t b = a + 1; b < t; ++b) {
      std::uint32_t ab = 0, ba = 0, hab = 0, hba = 0;
      bool all = true;
      for (ReplicaId i = 0; i < n; ++i) {
        long pa = p.pos[i][a], pb = p.pos[i][b];
        if (pa < 0 || pb < 0) {
          all = false;
          break;
        }
        bool before = pa < pb;
        (before ? ab : ba)++;
        if (honest[i]) (before ? hab : hba)++;
      }
      auto ea = at.find(p.txs[a]);
      auto eb = at.find(p.txs[b]);
      if (!all || ea == at.end() || eb == at.end()) {
        ++rep.skipped;
        continue;
      }
      if (hab == hba) {
        ++rep.ties;
        continue;
      }
      std::uint32_t dist = ab > ba ? ab - ba : ba - ab;
      auto& bk = buckets[dist];
      bk.dist = dist;
      ++bk.pairs;
      // Same batch is never a reversal.
      bool reversed = hab > hba ? ea->second > eb->second : eb->second > ea->second;
      if (reversed) ++bk.reversed;
      if (reference && th) {
        bool cert = hab > hba ? record_graphs(a, b) : record_graphs(b, a);
        if (cert) {
          ++bk.certified;
          if (reversed) ++bk.certified_reversed;
        }
      }
    }
  for (auto& [d, bk] : buckets) rep.buckets.push_back(bk);
  return rep;
}

void write_dist_csv(std::ostream& out, const DistReport& report) {
  out << "dist_bucket,pair_count,reversed_fraction\n";
  for (const auto& b : report.buckets)
    out << b.dist << ',' << b.pairs << ',' << b.reversed_fraction() << '\n';
}

}  // namespace herring::oracle
