#include "herring/dag.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace herring::dag {

Digest vertex_digest(const Vertex& v) {
  std::string buf = "vertex:" + std::to_string(v.author) + ":" + std::to_string(v.round) + ":";
  for (ReplicaId p : v.parents) buf += std::to_string(p) + ",";
  buf += worker::batch_digest(v.batch).hex();
  return Digest::of(buf);
}

DagStore::DagStore(std::uint32_t n, std::uint32_t f, std::uint32_t quorum, std::uint32_t wave_len,
                   std::uint64_t seed)
    : n_(n), f_(f), quorum_(quorum), wave_len_(wave_len), seed_(seed) {}

void DagStore::ensure_round(Round round) {
  while (vertices_.size() <= round) {
    vertices_.emplace_back(n_);
    cert_order_.emplace_back();
  }
}

DagStore::Slot* DagStore::slot(ReplicaId author, Round round) {
  if (round >= vertices_.size() || author >= n_) return nullptr;
  return &vertices_[round][author];
}

const DagStore::Slot* DagStore::slot(ReplicaId author, Round round) const {
  if (round >= vertices_.size() || author >= n_) return nullptr;
  return &vertices_[round][author];
}

void DagStore::add_vertex(Vertex v) {
  if (v.author >= n_) throw ProtocolError("vertex author out of range");
  if (v.round > 0 && v.parents.size() < quorum_)
    throw ProtocolError("vertex has fewer parents than the round quorum");
  ensure_round(v.round);
  Slot& s = vertices_[v.round][v.author];
  if (s.vertex) throw ProtocolError("duplicate vertex for (author, round)");
  if (v.round > 0) {
    for (ReplicaId p : v.parents) {
      Slot* ps = slot(p, v.round - 1);
      if (!ps || !ps->cert) throw ProtocolError("vertex references a missing certificate");
      ps->referenced = true;
    }
  }
  s.vertex = std::move(v);
}

void DagStore::add_certificate(Certificate c) {
  Slot* s = slot(c.author, c.round);
  if (!s || !s->vertex) throw ProtocolError("certificate for unknown vertex");
  if (s->cert) throw ProtocolError("duplicate certificate for (author, round)");
  if (c.attestors.size() < quorum_) throw ProtocolError("certificate below quorum");
  cert_order_[c.round].push_back(c.author);
  s->cert = std::move(c);
}

const Vertex* DagStore::vertex(ReplicaId author, Round round) const {
  const Slot* s = slot(author, round);
  return s && s->vertex ? &*s->vertex : nullptr;
}

const Certificate* DagStore::certificate(ReplicaId author, Round round) const {
  const Slot* s = slot(author, round);
  return s && s->cert ? &*s->cert : nullptr;
}

std::size_t DagStore::certificate_count(Round round) const {
  return round < cert_order_.size() ? cert_order_[round].size() : 0;
}

const std::vector<ReplicaId>& DagStore::certificate_order(Round round) const {
  static const std::vector<ReplicaId> kEmpty;
  return round < cert_order_.size() ? cert_order_[round] : kEmpty;
}

ReplicaId DagStore::leader_of_wave(std::uint64_t wave) const {
  return static_cast<ReplicaId>(mix64(seed_ ^ (wave * 0xd1b54a32d192ed03ULL)) % n_);
}

bool DagStore::is_committed(VertexRef v) const {
  const Slot* s = slot(v.author, v.round);
  return s && s->subdag.has_value();
}

std::optional<SubdagId> DagStore::subdag_of(VertexRef v) const {
  const Slot* s = slot(v.author, v.round);
  return s ? s->subdag : std::nullopt;
}

bool DagStore::is_referenced(VertexRef v) const {
  const Slot* s = slot(v.author, v.round);
  return s && s->referenced;
}

bool DagStore::has_path(VertexRef from, VertexRef to) const {
  if (from.round < to.round) return false;
  std::set<ReplicaId> frontier{from.author};
  for (Round r = from.round; r > to.round; --r) {
    std::set<ReplicaId> next;
    for (ReplicaId a : frontier) {
      const Vertex* v = vertex(a, r);
      if (!v) continue;
      next.insert(v->parents.begin(), v->parents.end());
    }
    frontier = std::move(next);
    if (frontier.empty()) return false;
  }
  return frontier.contains(to.author);
}

std::vector<CommittedSubdag> DagStore::try_commit(SimTime now) {
  std::vector<CommittedSubdag> out;
  for (;;) {
    Round lr = leader_round(next_wave_);
    Round vote_round = lr + 1;
    if (certificate_count(vote_round) < quorum_) break;
    std::uint64_t wave = next_wave_++;
    ReplicaId leader = leader_of_wave(wave);
    if (!certificate(leader, lr)) continue;

    const auto& order = certificate_order(vote_round);
    std::uint32_t refs = 0;
    for (std::size_t i = 0; i < quorum_; ++i) {
      const Vertex* v = vertex(order[i], vote_round);
      if (std::find(v->parents.begin(), v->parents.end(), leader) != v->parents.end()) ++refs;
    }
    if (refs < f_ + 1) continue;

    // Earlier undecided leaders reachable from this one commit first.
    std::vector<VertexRef> chain{{leader, lr}};
    VertexRef cur{leader, lr};
    for (std::uint64_t w = wave - 1; w > last_committed_wave_; --w) {
      VertexRef prev{leader_of_wave(w), leader_round(w)};
      if (certificate(prev.author, prev.round) && !is_committed(prev) && has_path(cur, prev)) {
        chain.push_back(prev);
        cur = prev;
      }
    }
    last_committed_wave_ = wave;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) out.push_back(commit_leader(*it, now));
  }
  return out;
}

CommittedSubdag DagStore::commit_leader(VertexRef leader, SimTime now) {
  std::vector<VertexRef> members;
  std::deque<VertexRef> queue{leader};
  std::set<VertexRef> seen{leader};
  while (!queue.empty()) {
    VertexRef ref = queue.front();
    queue.pop_front();
    Slot* s = slot(ref.author, ref.round);
    if (!s || !s->vertex || s->subdag) continue;
    members.push_back(ref);
    if (ref.round == 0) continue;
    for (ReplicaId p : s->vertex->parents) {
      VertexRef pr{p, ref.round - 1};
      if (seen.insert(pr).second) queue.push_back(pr);
    }
  }
  std::sort(members.begin(), members.end(), [](const VertexRef& a, const VertexRef& b) {
    return a.round != b.round ? a.round < b.round : a.author < b.author;
  });

  CommittedSubdag sd;
  sd.id = next_subdag_++;
  sd.leader = leader.author;
  sd.leader_round = leader.round;
  sd.commit_time = now;
  for (const auto& ref : members) {
    Slot* s = slot(ref.author, ref.round);
    s->subdag = sd.id;
    CommittedVertex cv;
    cv.author = ref.author;
    cv.round = ref.round;
    cv.contribution = s->vertex->batch.contribution();
    cv.votes = s->vertex->batch.votes;
    sd.vertices.push_back(std::move(cv));
  }
  return sd;
}

}  // namespace herring::dag
