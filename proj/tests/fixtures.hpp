#pragma once

#include <string>
#include <vector>

#include "herring/subdag.hpp"

namespace fixtures {

using herring::Digest;

inline Digest d(const std::string& s) { return Digest::of(s); }

/// One vertex per entry of `lists`, author = index, LOIs counted from `loi0`.
inline herring::CommittedVertex vertex(herring::ReplicaId author, const std::vector<std::string>& txs,
                                       herring::Loi loi0 = 0, herring::Round round = 1) {
  herring::CommittedVertex v;
  v.author = author;
  v.round = round;
  for (std::size_t k = 0; k < txs.size(); ++k) v.contribution.push_back({d(txs[k]), loi0 + k});
  return v;
}

inline herring::CommittedSubdag subdag(herring::SubdagId id,
                                       const std::vector<std::vector<std::string>>& lists,
                                       herring::Round round = 1) {
  herring::CommittedSubdag s;
  s.id = id;
  s.leader = 0;
  s.leader_round = round;
  for (std::size_t i = 0; i < lists.size(); ++i)
    if (!lists[i].empty())
      s.vertices.push_back(vertex(static_cast<herring::ReplicaId>(i), lists[i], id * 1000, round));
  return s;
}

}  // namespace fixtures
