#pragma once

#include <vector>

#include "herring/common.hpp"
#include "herring/worker.hpp"

namespace herring {

/// A committed vertex as seen by the fairness layer: the author's sealed
/// ordering contribution plus any FairUpdate votes its batch carried.
struct CommittedVertex {
  ReplicaId author = kNoReplica;
  Round round = 0;
  std::vector<worker::OrderEntry> contribution;
  std::vector<worker::FairUpdateVote> votes;
  bool operator==(const CommittedVertex&) const = default;
};

struct CommittedSubdag {
  SubdagId id = 0;
  ReplicaId leader = kNoReplica;
  Round leader_round = 0;
  SimTime commit_time = 0;
  /// Ascending (round, author).
  std::vector<CommittedVertex> vertices;
  bool operator==(const CommittedSubdag&) const = default;
};

}  // namespace herring
