#include <gtest/gtest.h>

#include <sstream>

#include "herring/harness.hpp"
#include "herring/oracle.hpp"
#include "herring/scenarios.hpp"
#include "herring/simulator.hpp"

using namespace herring;

TEST(Sim, DeterministicForSeed) {
  auto cfg = sweep_config(5, 1, 1.0, 7, 60, 1);
  auto a = sim::Simulator(cfg).run();
  auto b = sim::Simulator(cfg).run();
  EXPECT_EQ(a.emitted, b.emitted);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  // Everything but the wall-clock phase timings is reproducible.
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    const auto& ea = a.trace.events()[i];
    const auto& eb = b.trace.events()[i];
    if (std::holds_alternative<trace::PhaseTiming>(ea.payload)) {
      EXPECT_TRUE(std::holds_alternative<trace::PhaseTiming>(eb.payload));
      continue;
    }
    EXPECT_EQ(trace::event_to_json(ea), trace::event_to_json(eb)) << "event " << i;
  }
}

TEST(Sim, TraceJsonlRoundTrip) {
  auto r = sim::Simulator(sweep_config(5, 1, 1.0, 3, 40, 1)).run();
  std::ostringstream out;
  r.trace.write_jsonl(out);
  std::istringstream in(out.str());
  auto back = trace::RunTrace::read_jsonl(in);
  EXPECT_EQ(back.size(), r.trace.size());
  std::ostringstream again;
  back.write_jsonl(again);
  EXPECT_EQ(again.str(), out.str());
  EXPECT_EQ(back.emitted_orders(), r.trace.emitted_orders());
  EXPECT_EQ(back.committed().size(), r.committed.size());
}

TEST(Sim, EmitsEveryTransactionWithoutFaults) {
  auto r = sim::Simulator(sweep_config(5, 1, 1.0, 11, 80, 0)).run();
  EXPECT_TRUE(r.all_emitted);
  EXPECT_TRUE(r.parked_at_end.empty());
}

TEST(Sim, AblationFailsLoiCheckAndControlPasses) {
  auto s = build_scenario("ablation_noselfref", 1);
  auto off = sim::Simulator(s.config).run();
  EXPECT_FALSE(oracle::check_loi_monotone(off.trace).ok);
  s.config.self_reference = true;
  auto on = sim::Simulator(s.config).run();
  EXPECT_TRUE(oracle::check_loi_monotone(on.trace).ok);
}

TEST(Scenarios, UnknownNameThrows) {
  EXPECT_THROW(build_scenario("nope"), ConfigError);
  for (const auto& name : scenario_names()) EXPECT_NO_THROW(build_scenario(name));
}

TEST(Scenarios, CondorcetSingleBatch) {
  harness::RunOptions opt;
  opt.write_trace = false;
  auto rep = harness::run_scenario("condorcet_minimal", 1, opt);
  EXPECT_TRUE(rep.verdicts.all());
  ASSERT_EQ(rep.emitted.size(), 1u);
  EXPECT_EQ(rep.emitted[0].batch_sizes, std::vector<std::uint32_t>{3});
}
