#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "herring/harness.hpp"
#include "herring/oracle.hpp"
#include "herring/pipeline.hpp"

using namespace herring;

namespace {

// Random committed sequence: each subdag carries one contribution per
// replica drawn from a sliding window of transactions, in jittered order.
std::vector<CommittedSubdag> random_sequence(std::uint32_t n, std::size_t subdags, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> per_replica(n);
  std::vector<std::size_t> cursor(n, 0);
  std::vector<CommittedSubdag> out;
  std::size_t made = 0;
  for (SubdagId r = 1; r <= subdags; ++r) {
    CommittedSubdag sd;
    sd.id = r;
    for (ReplicaId i = 0; i < n; ++i) {
      if (rng() % 5 == 0) continue;
      CommittedVertex v;
      v.author = i;
      v.round = r;
      std::size_t k = 2 + rng() % 6;
      std::vector<std::string> txs;
      for (std::size_t j = 0; j < k; ++j) {
        std::size_t t = cursor[i] + rng() % 4;
        txs.push_back("t" + std::to_string(t));
        made = std::max(made, t);
      }
      cursor[i] += k / 2 + 1;
      std::set<std::string> seen;
      for (const auto& t : txs) {
        if (!seen.insert(t).second) continue;
        v.contribution.push_back({Digest::of(t), 0});
      }
      sd.vertices.push_back(v);
    }
    out.push_back(sd);
  }
  return out;
}

std::vector<fairness::FinalOrder> run(const std::vector<CommittedSubdag>& seq, const Thresholds& th,
                                      bool serial, std::size_t threads, std::size_t cap,
                                      std::vector<fairness::GraphSummary>* graphs = nullptr) {
  fairness::PipelineOptions opt;
  opt.serial = serial;
  opt.threads = threads;
  opt.inflight_cap = cap;
  fairness::FairnessPipeline p(th, opt);
  if (graphs) p.on_graph_built = [&](const fairness::GraphSummary& g) { graphs->push_back(g); };
  std::vector<fairness::FinalOrder> out;
  for (const auto& sd : seq)
    for (auto& o : p.on_commit(sd)) out.push_back(std::move(o));
  for (auto& o : p.flush()) out.push_back(std::move(o));
  return out;
}

}  // namespace

TEST(Pipeline, EmptySequence) {
  auto th = Thresholds::make(5, 1, 1.0);
  EXPECT_TRUE(run({}, th, false, 2, 0).empty());
  EXPECT_TRUE(oracle::serial_reference({}, th).orders.empty());
}

TEST(Pipeline, RejectsOutOfOrderSubdag) {
  auto th = Thresholds::make(5, 1, 1.0);
  fairness::FairnessPipeline p(th, {});
  EXPECT_THROW(p.on_commit(fixtures::subdag(2, {{"a"}})), ProtocolError);
}

TEST(Pipeline, ConcurrentMatchesSerialOnRandomSequences) {
  for (std::uint32_t n : {5u, 9u}) {
    auto th = Thresholds::make(n, (n - 1) / 4, 1.0);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto seq = random_sequence(n, 25, seed);
      std::vector<fairness::GraphSummary> gs, gc;
      auto serial = run(seq, th, true, 1, 0, &gs);
      for (std::size_t threads : {1u, 2u, 4u})
        for (std::size_t cap : {1u, 3u, 8u}) {
          gc.clear();
          ASSERT_EQ(run(seq, th, false, threads, cap, &gc), serial) << "seed " << seed;
          ASSERT_EQ(gc.size(), gs.size());
          for (std::size_t k = 0; k < gs.size(); ++k) ASSERT_EQ(gc[k].retained, gs[k].retained);
        }
      ASSERT_EQ(oracle::serial_reference(seq, th).orders, serial) << "seed " << seed;
    }
  }
}

TEST(Pipeline, ParkedGraphResolvesWithVotes) {
  auto th = Thresholds::make(5, 1, 1.0);
  auto s1 = fixtures::subdag(1, {{"a", "b", "z"}, {"b", "a", "z"}, {"z"}});
  fairness::FairnessPipeline p(th, {});
  std::vector<TxPair> parked;
  p.on_parked = [&](SubdagId, const std::vector<TxPair>& m) { parked = m; };
  EXPECT_TRUE(p.on_commit(s1).empty());
  EXPECT_TRUE(p.flush().empty());
  ASSERT_EQ(parked.size(), 1u);
  CommittedSubdag s2;
  s2.id = 2;
  for (ReplicaId a = 0; a < 4; ++a) {
    CommittedVertex v;
    v.author = a;
    v.votes.push_back({1, a, {{Digest::of("b"), Digest::of("a")}}});
    s2.vertices.push_back(v);
  }
  auto out = p.on_commit(s2);
  for (auto& o : p.flush()) out.push_back(o);
  ASSERT_GE(out.size(), 1u);
  EXPECT_EQ(out[0].digests, (std::vector<Digest>{Digest::of("b"), Digest::of("a"), Digest::of("z")}));
}

TEST(Pipeline, SimulatedRunsMatchReference) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    SimConfig c = sweep_config(9, 2, 1.0, seed, 60, 2);
    auto res = sim::Simulator(c).run();
    auto th = c.thresholds();
    auto concurrent = harness::replay(res.committed, th, false, 4);
    auto serial = harness::replay(res.committed, th, true, 1);
    EXPECT_EQ(concurrent.emitted, serial.emitted);
    EXPECT_EQ(oracle::serial_reference(res.committed, th).orders, serial.emitted);
  }
}
