#pragma once

#include <optional>
#include <vector>

#include "herring/common.hpp"
#include "herring/subdag.hpp"
#include "herring/worker.hpp"

namespace herring::dag {

struct VertexRef {
  ReplicaId author = 0;
  Round round = 0;
  auto operator<=>(const VertexRef&) const = default;
};

struct Vertex {
  ReplicaId author = 0;
  Round round = 0;
  /// Authors of the round-1 certificates this vertex references.
  std::vector<ReplicaId> parents;
  worker::Batch batch;
  SimTime created_at = 0;
};

struct Certificate {
  ReplicaId author = 0;
  Round round = 0;
  Digest vertex;
  std::vector<ReplicaId> attestors;
  SimTime formed_at = 0;
};

Digest vertex_digest(const Vertex& v);

/// Global DAG plus the wave-based commit rule. Every replica in the simulation
/// observes the same committed sequence, so one store serves all of them.
class DagStore {
 public:
  DagStore(std::uint32_t n, std::uint32_t f, std::uint32_t quorum, std::uint32_t wave_len,
           std::uint64_t seed);

  /// Throws ProtocolError on a duplicate (author, round) or a short parent set.
  void add_vertex(Vertex v);
  void add_certificate(Certificate c);

  const Vertex* vertex(ReplicaId author, Round round) const;
  const Certificate* certificate(ReplicaId author, Round round) const;
  std::size_t certificate_count(Round round) const;
  /// Certificates of `round` in formation order.
  const std::vector<ReplicaId>& certificate_order(Round round) const;
  Round max_round() const { return vertices_.empty() ? 0 : vertices_.size() - 1; }

  ReplicaId leader_of_wave(std::uint64_t wave) const;
  Round leader_round(std::uint64_t wave) const { return wave * wave_len_; }

  /// Decides every wave whose vote round has gathered a quorum of
  /// certificates. Returns newly committed subdags in commit order.
  std::vector<CommittedSubdag> try_commit(SimTime now);

  bool is_committed(VertexRef v) const;
  std::optional<SubdagId> subdag_of(VertexRef v) const;
  /// True once any vertex lists v's certificate as a parent.
  bool is_referenced(VertexRef v) const;
  bool has_path(VertexRef from, VertexRef to) const;
  SubdagId committed_count() const { return next_subdag_ - 1; }
  std::uint64_t decided_waves() const { return next_wave_ - 1; }

 private:
  struct Slot {
    std::optional<Vertex> vertex;
    std::optional<Certificate> cert;
    std::optional<SubdagId> subdag;
    bool referenced = false;
  };
  Slot* slot(ReplicaId author, Round round);
  const Slot* slot(ReplicaId author, Round round) const;
  void ensure_round(Round round);
  CommittedSubdag commit_leader(VertexRef leader, SimTime now);

  std::uint32_t n_, f_, quorum_, wave_len_;
  std::uint64_t seed_;
  std::vector<std::vector<Slot>> vertices_;
  std::vector<std::vector<ReplicaId>> cert_order_;
  std::uint64_t next_wave_ = 1;
  std::uint64_t last_committed_wave_ = 0;
  SubdagId next_subdag_ = 1;
};

}  // namespace herring::dag
