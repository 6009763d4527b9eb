#include <gtest/gtest.h>

#include "herring/adversaries.hpp"
#include "herring/worker.hpp"

using namespace herring;
using namespace herring::worker;

namespace {
Transaction tx(const std::string& s) { return Transaction::from_body(s); }
}  // namespace

TEST(LoiTracker, MonotoneFirstObservation) {
  LoiTracker t;
  auto a = t.record(Digest::of("a"));
  auto b = t.record(Digest::of("b"));
  auto again = t.record(Digest::of("a"));
  EXPECT_TRUE(a.second);
  EXPECT_LT(a.first, b.first);
  EXPECT_FALSE(again.second);
  EXPECT_EQ(again.first, a.first);
}

TEST(Worker, DirectThenIndirect) {
  Worker w(0);
  w.on_client_tx(tx("a"));
  w.on_client_tx(tx("a"));
  Batch remote;
  remote.author = 1;
  remote.direct_entries = {{tx("b"), 0}, {tx("a"), 1}};
  auto fresh = w.on_remote_batch(remote);
  ASSERT_EQ(fresh.size(), 1u);
  EXPECT_EQ(fresh[0], Digest::of("b"));
  Batch out = w.build_batch();
  ASSERT_EQ(out.direct_entries.size(), 1u);
  ASSERT_EQ(out.indirect_entries.size(), 1u);
  auto c = out.contribution();
  EXPECT_EQ(c[0].tx, Digest::of("a"));
  EXPECT_EQ(c[1].tx, Digest::of("b"));
  EXPECT_TRUE(w.build_batch().empty());
}

TEST(Worker, BatchLimitKeepsRemainder) {
  Worker w(0);
  for (int i = 0; i < 5; ++i) w.on_client_tx(tx("t" + std::to_string(i)));
  EXPECT_EQ(w.build_batch(3).contribution().size(), 3u);
  auto rest = w.build_batch(3).contribution();
  ASSERT_EQ(rest.size(), 2u);
  EXPECT_EQ(rest[0].loi, 3u);
}

TEST(Worker, FairProposeDefersUnknownEndpoint) {
  Worker w(2);
  w.on_client_tx(tx("a"));
  w.on_fair_propose(4, {TxPair::make(Digest::of("a"), Digest::of("b"))});
  EXPECT_EQ(w.queued_votes(), 0u);
  w.on_client_tx(tx("b"));
  ASSERT_EQ(w.queued_votes(), 1u);
  Batch out = w.build_batch();
  ASSERT_EQ(out.votes.size(), 1u);
  EXPECT_EQ(out.votes[0].target, 4u);
  EXPECT_EQ(out.votes[0].author, 2u);
  ASSERT_EQ(out.votes[0].edges.size(), 1u);
  EXPECT_EQ(out.votes[0].edges[0].from, Digest::of("a"));
  EXPECT_THROW(w.on_fair_propose(4, {}), ProtocolError);
}

TEST(Worker, EmptyMissingSetVotesImmediately) {
  Worker w(0);
  w.on_fair_propose(1, {});
  EXPECT_EQ(w.queued_votes(), 1u);
}

TEST(Worker, ReversingMatchesStrategy) {
  Worker honest(0), rev(0, true);
  for (const char* s : {"a", "b", "c", "d"}) {
    honest.on_client_tx(tx(s));
    rev.on_client_tx(tx(s));
  }
  auto h = honest.build_batch().contribution();
  auto r = rev.build_batch().contribution();
  EXPECT_EQ(r, adversary::reverse_order_strategy(h));
  EXPECT_EQ(r.front().tx, Digest::of("d"));
}

TEST(Adversary, ReverseExamples) {
  std::vector<OrderEntry> one{{Digest::of("a"), 7}};
  EXPECT_EQ(adversary::reverse_order_strategy(one), one);
  std::vector<OrderEntry> abc{{Digest::of("a"), 1}, {Digest::of("b"), 2}, {Digest::of("c"), 3}};
  auto r = adversary::reverse_order_strategy(abc);
  EXPECT_EQ(r[0].tx, Digest::of("c"));
  EXPECT_EQ(r[2].tx, Digest::of("a"));
  EXPECT_EQ(r[0].loi, 1u);
}

TEST(Adversary, CrashScheduleWithinBudget) {
  auto s = adversary::random_crash_schedule(13, 3, 20, 9);
  ASSERT_EQ(s.size(), 3u);
  std::set<ReplicaId> ids;
  for (const auto& e : s) {
    ids.insert(e.replica);
    EXPECT_GE(e.activation_round, 1u);
    EXPECT_LE(e.activation_round, 20u);
  }
  EXPECT_EQ(ids.size(), 3u);
}

TEST(BatchCodec, RoundTrips) {
  Batch b;
  b.author = 3;
  b.sequence = 9;
  b.direct_entries = {{tx("a"), 4}};
  b.indirect_entries = {{Digest::of("b"), 5}};
  b.votes = {{2, 3, {{Digest::of("a"), Digest::of("b")}}}};
  EXPECT_EQ(decode_binary(encode_binary(b)), b);
  EXPECT_EQ(decode_json(encode_json(b)), b);
  EXPECT_EQ(batch_digest(b), batch_digest(decode_binary(encode_binary(b))));
  auto bytes = encode_binary(b);
  bytes.pop_back();
  EXPECT_THROW(decode_binary(bytes), ConfigError);
  bytes = encode_binary(b);
  bytes.push_back(0);
  EXPECT_THROW(decode_binary(bytes), ConfigError);
}
