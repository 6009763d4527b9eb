#include <gtest/gtest.h>

#include "herring/baselines.hpp"

using namespace herring::baseline;

TEST(FairDag, Thresholds) {
  FairDagModel m(4, 1, FairDagMode::kUnpatched);
  EXPECT_EQ(m.shaded_threshold(), 2u);
  EXPECT_EQ(m.solid_threshold(), 3u);
}

TEST(FairDag, UnpatchedAttackStallsForever) {
  auto o = run_fairdag_attack(FairDagMode::kUnpatched);
  EXPECT_EQ(o.weight_ab, 1u);
  EXPECT_EQ(o.weight_ba, 1u);
  EXPECT_FALSE(o.edge_added);
  EXPECT_FALSE(o.finalized);
  EXPECT_EQ(o.rounds, 1000u);
}

TEST(FairDag, PatchedAttackFinalizes) {
  auto o = run_fairdag_attack(FairDagMode::kPatched);
  EXPECT_EQ(o.weight_ab, 2u);
  EXPECT_TRUE(o.edge_added);
  EXPECT_TRUE(o.finalized);
}

TEST(FairDag, SymmetricDeliverySameUnderBothModes) {
  // Every replica sees a then b in the same subdag: no promotion asymmetry.
  for (auto mode : {FairDagMode::kUnpatched, FairDagMode::kPatched}) {
    FairDagModel m(4, 1, mode);
    ModelSubdag s;
    for (herring::ReplicaId i = 0; i < 3; ++i) s.push_back({i, {{"a", 0}, {"b", 1}}});
    m.on_subdag(s);
    auto g = m.graph_of("a");
    ASSERT_TRUE(g.has_value());
    EXPECT_EQ(m.weight(*g, "a", "b"), 3u);
    EXPECT_TRUE(m.has_edge(*g, "a", "b"));
    EXPECT_TRUE(m.is_tournament(*g));
    EXPECT_EQ(m.executed(), 1u);
  }
}

TEST(FairDag, PairCountedOncePerReplica) {
  FairDagModel m(4, 1, FairDagMode::kPatched);
  ModelSubdag s{{0, {{"a", 0}, {"b", 1}}}, {0, {{"a", 0}, {"b", 1}}}, {1, {{"a", 0}, {"b", 1}}}};
  m.on_subdag(s);
  auto g = m.graph_of("a");
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(m.weight(*g, "a", "b"), 2u);
}

TEST(Dod, BuggyStalls) {
  auto o = run_dod_scenario(DodMode::kBuggy);
  EXPECT_EQ(o.w_ab, 1u);
  EXPECT_EQ(o.w_ba, 1u);
  EXPECT_FALSE(o.reached_threshold);
  EXPECT_TRUE(o.queue_stalled);
}

TEST(Dod, ExplicitPatchDrains) {
  auto o = run_dod_scenario(DodMode::kExplicitPatch);
  EXPECT_FALSE(o.queue_stalled);
  EXPECT_EQ(o.queued, 0u);
  EXPECT_GT(o.executed, 0u);
}

TEST(Dod, DegenerateSameRoundHasNoMissingEdge) {
  DodModel m(5, 1, 1.0, DodMode::kBuggy);
  for (herring::ReplicaId i = 0; i < 4; ++i) m.local_order(i, 1, {"a", "b"});
  m.global_order(1, {0, 1, 2, 3});
  EXPECT_FALSE(m.is_missing("a", "b"));
  EXPECT_EQ(m.drain(), 1u);
  EXPECT_EQ(m.queued(), 0u);
}

TEST(Vignette, WeightDivergence) {
  auto v = weight_divergence_vignette();
  EXPECT_EQ(v.first_stored, 2u);
  EXPECT_EQ(v.second_stored, 1u);
  EXPECT_EQ(v.first_after, 3u);
  EXPECT_EQ(v.second_after, 2u);
}

TEST(Vignette, WeightInflation) {
  auto v = weight_inflation_vignette();
  EXPECT_EQ(v.evidence, 1u);
  EXPECT_EQ(v.after, 5u);
  EXPECT_EQ(v.threshold, 2u);
  EXPECT_LT(v.evidence, v.threshold);
  EXPECT_GE(v.after, v.threshold);
}
