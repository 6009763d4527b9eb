#include "herring/worker.hpp"

#include <algorithm>
#include <cassert>

namespace herring::worker {

std::vector<OrderEntry> Batch::contribution() const {
  std::vector<OrderEntry> out;
  out.reserve(direct_entries.size() + indirect_entries.size());
  for (const auto& e : direct_entries) out.push_back({e.tx.digest, e.loi});
  for (const auto& e : indirect_entries) out.push_back(e);
  std::stable_sort(out.begin(), out.end(),
                   [](const OrderEntry& a, const OrderEntry& b) { return a.loi < b.loi; });
  return out;
}

std::pair<Loi, bool> LoiTracker::record(const Digest& tx) {
  auto [it, inserted] = assignment_.try_emplace(tx, next_loi_);
  if (inserted) ++next_loi_;
  return {it->second, inserted};
}

std::optional<Loi> LoiTracker::lookup(const Digest& tx) const {
  auto it = assignment_.find(tx);
  if (it == assignment_.end()) return std::nullopt;
  return it->second;
}

void PendingEdgeStore::on_fair_propose(SubdagId r, const std::vector<TxPair>& missing,
                                       const LoiTracker& tracker) {
  if (!proposed_.insert(r).second)
    throw ProtocolError("duplicate FairPropose for subdag " + std::to_string(r));
  auto& unresolved = pending_[r];
  resolved_[r];
  for (const auto& pair : missing) {
    if (tracker.knows(pair.first) && tracker.knows(pair.second)) {
      resolve(r, pair, tracker);
    } else {
      unresolved.insert(pair);
      if (!tracker.knows(pair.first)) by_endpoint_[pair.first].insert(r);
      if (!tracker.knows(pair.second)) by_endpoint_[pair.second].insert(r);
    }
  }
  check_complete(r);
}

void PendingEdgeStore::on_new_tx(const Digest& tx, const LoiTracker& tracker) {
  auto it = by_endpoint_.find(tx);
  if (it == by_endpoint_.end()) return;
  std::set<SubdagId> rounds = std::move(it->second);
  by_endpoint_.erase(it);
  for (SubdagId r : rounds) {
    auto pit = pending_.find(r);
    if (pit == pending_.end()) continue;
    auto& unresolved = pit->second;
    for (auto pair_it = unresolved.begin(); pair_it != unresolved.end();) {
      const TxPair& pair = *pair_it;
      bool touches = pair.first == tx || pair.second == tx;
      if (touches && tracker.knows(pair.first) && tracker.knows(pair.second)) {
        resolve(r, pair, tracker);
        pair_it = unresolved.erase(pair_it);
      } else {
        ++pair_it;
      }
    }
    check_complete(r);
  }
}

void PendingEdgeStore::resolve(SubdagId r, const TxPair& pair, const LoiTracker& tracker) {
  Loi a = *tracker.lookup(pair.first);
  Loi b = *tracker.lookup(pair.second);
  // LOIs are unique per replica.
  assert(a != b);
  resolved_[r].push_back(a < b ? DirectedEdge{pair.first, pair.second}
                               : DirectedEdge{pair.second, pair.first});
}

void PendingEdgeStore::check_complete(SubdagId r) {
  auto it = pending_.find(r);
  if (it != pending_.end() && it->second.empty() && resolved_.contains(r)) completed_.insert(r);
}

std::vector<std::pair<SubdagId, std::vector<DirectedEdge>>> PendingEdgeStore::take_completed() {
  std::vector<std::pair<SubdagId, std::vector<DirectedEdge>>> out;
  for (SubdagId r : completed_) {
    auto edges = std::move(resolved_[r]);
    std::sort(edges.begin(), edges.end());
    out.emplace_back(r, std::move(edges));
    resolved_.erase(r);
    pending_.erase(r);
  }
  completed_.clear();
  return out;
}

const std::set<TxPair>* PendingEdgeStore::unresolved(SubdagId r) const {
  auto it = pending_.find(r);
  return it == pending_.end() ? nullptr : &it->second;
}

const std::vector<DirectedEdge>* PendingEdgeStore::resolved(SubdagId r) const {
  auto it = resolved_.find(r);
  return it == resolved_.end() ? nullptr : &it->second;
}

std::pair<Loi, bool> Worker::on_client_tx(const Transaction& tx) {
  auto [loi, first] = tracker_.record(tx.digest);
  if (first) {
    direct_.push_back({tx, loi});
    observe(tx.digest);
  }
  return {loi, first};
}

std::vector<Digest> Worker::on_remote_batch(const Batch& batch) {
  std::vector<Digest> fresh;
  if (batch.author == id_) return fresh;
  // Indirect entries of the remote batch are ordering reports only and are
  // never re-forwarded.
  for (const auto& entry : batch.direct_entries) {
    auto [loi, first] = tracker_.record(entry.tx.digest);
    if (!first) continue;
    indirect_.push_back({entry.tx.digest, loi});
    fresh.push_back(entry.tx.digest);
    observe(entry.tx.digest);
  }
  return fresh;
}

void Worker::observe(const Digest& d) {
  edges_.on_new_tx(d, tracker_);
  collect_votes();
}

void Worker::on_fair_propose(SubdagId r, const std::vector<TxPair>& missing) {
  edges_.on_fair_propose(r, missing, tracker_);
  collect_votes();
}

void Worker::collect_votes() {
  for (auto& [r, edges] : edges_.take_completed()) {
    FairUpdateVote vote{r, id_, std::move(edges)};
    new_votes_.push_back(vote);
    votes_.push_back(std::move(vote));
  }
}

void Worker::reinject(const std::vector<OrderEntry>& entries) {
  indirect_.insert(indirect_.end(), entries.begin(), entries.end());
}

Batch Worker::build_batch(std::size_t max_entries) {
  Batch batch;
  batch.author = id_;
  batch.sequence = sequence_++;

  auto by_loi = [](const auto& a, const auto& b) { return a.loi < b.loi; };
  std::stable_sort(direct_.begin(), direct_.end(), by_loi);
  std::stable_sort(indirect_.begin(), indirect_.end(), by_loi);

  std::size_t total = direct_.size() + indirect_.size();
  std::size_t take = max_entries == 0 ? total : std::min(total, max_entries);
  std::size_t di = 0, ii = 0;
  for (std::size_t k = 0; k < take; ++k) {
    bool pick_direct = ii == indirect_.size() ||
                       (di < direct_.size() && direct_[di].loi < indirect_[ii].loi);
    if (pick_direct) {
      batch.direct_entries.push_back(std::move(direct_[di++]));
    } else {
      batch.indirect_entries.push_back(indirect_[ii++]);
    }
  }
  direct_.erase(direct_.begin(), direct_.begin() + static_cast<std::ptrdiff_t>(di));
  indirect_.erase(indirect_.begin(), indirect_.begin() + static_cast<std::ptrdiff_t>(ii));
  batch.votes = std::exchange(votes_, {});

  if (reverse_) {
    // Report the sealed entries in reverse receive order by permuting the
    // batch's LOI values.
    std::vector<Loi*> slots;
    for (auto& e : batch.direct_entries) slots.push_back(&e.loi);
    for (auto& e : batch.indirect_entries) slots.push_back(&e.loi);
    std::sort(slots.begin(), slots.end(), [](Loi* a, Loi* b) { return *a < *b; });
    std::vector<Loi> values;
    for (Loi* s : slots) values.push_back(*s);
    for (std::size_t i = 0; i < slots.size(); ++i) *slots[i] = values[values.size() - 1 - i];
    std::stable_sort(batch.direct_entries.begin(), batch.direct_entries.end(), by_loi);
    std::stable_sort(batch.indirect_entries.begin(), batch.indirect_entries.end(), by_loi);
  }
  return batch;
}

}  // namespace herring::worker
