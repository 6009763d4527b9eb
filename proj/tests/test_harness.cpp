#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "herring/harness.hpp"

using namespace herring;
using namespace herring::harness;

namespace {
RunOptions quiet() {
  RunOptions o;
  o.write_trace = false;
  return o;
}
}  // namespace

TEST(Sweep, EmptyGridGivesHeaderOnly) {
  auto rows = sweep({}, {1}, quiet());
  EXPECT_TRUE(rows.empty());
  std::ostringstream out;
  write_sweep_csv(out, rows);
  auto s = out.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1);
}

TEST(Sweep, InfeasibleCellSkipped) {
  auto rows = sweep({{4, 2, 1.0, 20, 1.0}}, {1}, quiet());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].skipped);
  EXPECT_FALSE(rows[0].reason.empty());
  EXPECT_EQ(rows[0].runs, 0u);
}

TEST(Sweep, AverageIsMeanOfRuns) {
  SweepCell cell{5, 1, 1.0, 40, 1.0};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  auto rows = sweep({cell}, seeds, quiet());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].runs, 5u);
  double tps = 0, lat = 0;
  for (auto s : seeds) {
    auto cfg = sweep_config(cell.n, cell.f, cell.gamma, s, cell.tx_count, 0);
    cfg.workload.interval_ms = cell.interval_ms;
    auto r = run_config(cfg, "sweep", quiet());
    tps += r.throughput_tps;
    lat += r.latency_mean_ms;
  }
  EXPECT_NEAR(rows[0].throughput_tps, tps / 5, 1e-6 * (1 + tps));
  EXPECT_NEAR(rows[0].latency_mean_ms, lat / 5, 1e-6 * (1 + lat));
}

TEST(Report, OrderDigestReproducible) {
  auto a = run_scenario("reversing_fig8_f2", 4, quiet());
  auto b = run_scenario("reversing_fig8_f2", 4, quiet());
  EXPECT_EQ(a.order_digest, b.order_digest);
  EXPECT_EQ(a.order_digest.size(), 64u);
  EXPECT_TRUE(a.verdicts.all());
}

TEST(Report, SerialAndConcurrentDigestsMatch) {
  auto cfg = sweep_config(9, 2, 1.0, 9, 100, 2);
  RunOptions ser = quiet();
  ser.serial = true;
  auto a = run_config(cfg, "x", ser);
  auto b = run_config(cfg, "x", quiet());
  EXPECT_EQ(a.order_digest, b.order_digest);
}

TEST(Artifacts, WritesAllFiles) {
  auto dir = std::filesystem::temp_directory_path() / "herring_artifacts_test";
  std::filesystem::remove_all(dir);
  RunOptions o;
  o.out_dir = dir.string();
  o.always_dist = true;
  auto rep = run_scenario("condorcet_minimal", 1, o);
  for (auto f : {"trace.jsonl", "report.json", "metrics.csv", "dist.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  std::ifstream dist(dir / "dist.csv");
  std::string header;
  std::getline(dist, header);
  EXPECT_EQ(header, "dist_bucket,pair_count,reversed_fraction");
  std::filesystem::remove_all(dir);
}
