#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "herring/oracle.hpp"

using namespace herring;
using fixtures::d;

namespace {

trace::RunTrace receipts(const std::vector<std::vector<std::string>>& orders,
                         std::vector<FaultEntry> faults = {}) {
  trace::RunTrace t;
  t.add(0, kNoReplica,
        trace::RunStarted{static_cast<std::uint32_t>(orders.size()), 0, 1.0, faults, "fixture"});
  for (std::size_t i = 0; i < orders.size(); ++i)
    for (std::size_t k = 0; k < orders[i].size(); ++k)
      t.add(1, static_cast<ReplicaId>(i), trace::TxReceived{d(orders[i][k]), k, true});
  return t;
}

fairness::FinalOrder batches(SubdagId r, const std::vector<std::vector<std::string>>& bs) {
  fairness::FinalOrder o;
  o.r = r;
  for (const auto& b : bs) {
    for (const auto& x : b) o.digests.push_back(d(x));
    o.batch_sizes.push_back(static_cast<std::uint32_t>(b.size()));
  }
  return o;
}

}  // namespace

TEST(BatchOf, UnanimousOrderPasses) {
  auto t = receipts({{"a", "b", "c"}, {"a", "b", "c"}, {"a", "b", "c"}});
  auto rep = oracle::check_batch_of(t, {batches(1, {{"a"}, {"b"}, {"c"}})}, 1.0);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.checked_pairs, 3u);
  // Same batch counts as no later.
  EXPECT_TRUE(oracle::check_batch_of(t, {batches(1, {{"a", "b", "c"}})}, 1.0).ok());
}

TEST(BatchOf, FindsPlantedSwap) {
  auto t = receipts({{"a", "b", "c"}, {"a", "b", "c"}, {"a", "b", "c"}});
  auto rep = oracle::check_batch_of(t, {batches(1, {{"b"}, {"a"}}), batches(2, {{"c"}})}, 1.0);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].first, d("a"));
  EXPECT_EQ(rep.violations[0].second, d("b"));
  EXPECT_EQ(rep.violations[0].support, 3u);
}

TEST(BatchOf, MissingEarlierTxIsViolation) {
  auto t = receipts({{"a", "b"}, {"a", "b"}, {"a", "b"}});
  auto rep = oracle::check_batch_of(t, {batches(1, {{"b"}})}, 1.0);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_FALSE(rep.violations[0].first_batch.has_value());
}

TEST(BatchOf, ScopedToReceivedByAll) {
  auto t = receipts({{"a", "b"}, {"a", "b"}, {"a"}});
  auto rep = oracle::check_batch_of(t, {batches(1, {{"b"}, {"a"}})}, 1.0);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.skipped_pairs, 1u);
  EXPECT_EQ(rep.checked_pairs, 0u);
}

TEST(BatchOf, GammaThreshold) {
  // 4 of 5 receive a first: gamma 0.8 binds, gamma 1 does not.
  auto t = receipts({{"a", "b"}, {"a", "b"}, {"a", "b"}, {"a", "b"}, {"b", "a"}});
  auto out = std::vector{batches(1, {{"b"}, {"a"}})};
  EXPECT_FALSE(oracle::check_batch_of(t, out, 0.8).ok());
  EXPECT_TRUE(oracle::check_batch_of(t, out, 1.0).ok());
}

TEST(SingleGraph, DetectsDuplicate) {
  trace::RunTrace t;
  t.add(0, 0, trace::GraphBuilt{1, 2, 0, 0, {d("a"), d("b")}, {}});
  t.add(0, 0, trace::GraphBuilt{2, 1, 0, 0, {d("c")}, {}});
  EXPECT_TRUE(oracle::check_single_graph(t).ok);
  t.add(0, 0, trace::GraphBuilt{3, 1, 0, 0, {d("b")}, {}});
  auto r = oracle::check_single_graph(t);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.detail.find(d("b").hex()), std::string::npos);
}

TEST(LoiMonotone, DetectsRegression) {
  trace::RunTrace t;
  t.add(0, kNoReplica, trace::RunStarted{5, 1, 1.0, {}, "fixture"});
  auto s1 = fixtures::subdag(1, {{"a", "b"}});
  t.add(0, 0, trace::SubdagCommitted{s1});
  EXPECT_TRUE(oracle::check_loi_monotone(t).ok);
  auto s2 = fixtures::subdag(2, {{"c"}});
  s2.vertices[0].contribution[0].loi = 3;  // below subdag 1's LOIs
  t.add(0, 0, trace::SubdagCommitted{s2});
  EXPECT_FALSE(oracle::check_loi_monotone(t).ok);
}

TEST(LoiMonotone, IgnoresFaultyReplicas) {
  trace::RunTrace t;
  t.add(0, kNoReplica,
        trace::RunStarted{5, 1, 1.0, {{0, FaultStrategy::kReverseLocalOrder, 1}}, "fixture"});
  auto s1 = fixtures::subdag(1, {{"a", "b"}});
  std::swap(s1.vertices[0].contribution[0].loi, s1.vertices[0].contribution[1].loi);
  t.add(0, 0, trace::SubdagCommitted{s1});
  EXPECT_TRUE(oracle::check_loi_monotone(t).ok);
}

TEST(Dist, HandCountedFixture) {
  auto t = receipts({{"a", "b", "c"}, {"a", "b", "c"}, {"c", "b", "a"}});
  auto rep = oracle::dist_histogram(t, {batches(1, {{"c"}, {"a"}, {"b"}})});
  ASSERT_EQ(rep.buckets.size(), 1u);
  EXPECT_EQ(rep.buckets[0].dist, 1u);
  EXPECT_EQ(rep.buckets[0].pairs, 3u);
  EXPECT_EQ(rep.buckets[0].reversed, 2u);
}

TEST(Dist, AgreementIsDistN) {
  auto t = receipts({{"a", "b"}, {"a", "b"}, {"a", "b"}});
  auto rep = oracle::dist_histogram(t, {batches(1, {{"a"}, {"b"}})});
  ASSERT_EQ(rep.buckets.size(), 1u);
  EXPECT_EQ(rep.buckets[0].dist, 3u);
  EXPECT_EQ(rep.buckets[0].reversed, 0u);
}

TEST(Dist, OddLabelsForTwentyOne) {
  std::vector<std::vector<std::string>> orders;
  std::vector<std::string> txs;
  for (int k = 0; k < 22; ++k) txs.push_back("t" + std::to_string(k));
  // Replica i receives t_j before t_{j+1} iff j < i, so pair spreads vary.
  for (int i = 0; i < 21; ++i) {
    std::vector<std::string> o = txs;
    std::reverse(o.begin(), o.begin() + std::min(22, i + 1));
    orders.push_back(o);
  }
  auto t = receipts(orders);
  auto rep = oracle::dist_histogram(t, {batches(1, {txs})});
  ASSERT_FALSE(rep.buckets.empty());
  for (const auto& b : rep.buckets) {
    EXPECT_EQ(b.dist % 2, 1u);
    EXPECT_LE(b.dist, 21u);
  }
}

TEST(Dist, CsvSchema) {
  oracle::DistReport r;
  r.buckets.push_back({1, 4, 1, 0, 0});
  std::ostringstream out;
  oracle::write_dist_csv(out, r);
  EXPECT_EQ(out.str(), "dist_bucket,pair_count,reversed_fraction\n1,4,0.25\n");
}

TEST(SerialReference, StopsAtUnresolvedGraph) {
  auto th = Thresholds::make(5, 1, 1.0);
  auto s1 = fixtures::subdag(1, {{"a", "b", "z"}, {"b", "a", "z"}, {"z"}});
  auto s2 = fixtures::subdag(2, {{"x"}, {"x"}, {"x"}});
  auto ref = oracle::serial_reference({s1, s2}, th);
  EXPECT_TRUE(ref.orders.empty());
  EXPECT_EQ(ref.unresolved, std::set<SubdagId>{1});
  ASSERT_EQ(ref.graphs.size(), 2u);
  EXPECT_TRUE(ref.graphs[0].parked);
  EXPECT_EQ(ref.graphs[1].retained, std::vector<Digest>{d("x")});
}
