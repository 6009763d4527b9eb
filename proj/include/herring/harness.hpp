#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "herring/baselines.hpp"
#include "herring/oracle.hpp"
#include "herring/scenarios.hpp"
#include "herring/simulator.hpp"

namespace herring::harness {

struct RunOptions {
  bool serial = false;
  std::size_t threads = 4;
  bool write_trace = true;
  /// Empty means no files are written.
  std::string out_dir;
  /// Dist histogram is computed for runs with reversing replicas, or always
  /// when set.
  bool always_dist = false;
};

struct Verdicts {
  bool serial_equivalence = true;
  bool batch_of = true;
  bool single_graph = true;
  bool loi_monotone = true;
  bool all() const { return serial_equivalence && batch_of && single_graph && loi_monotone; }
};

struct PhaseRow {
  std::string phase;
  double mean_ns = 0;
  std::size_t samples = 0;
};

struct RunReport {
  std::string scenario;
  SimConfig config;
  sim::SimResult sim;
  std::vector<fairness::FinalOrder> emitted;  // from the replayed pipeline
  std::string order_digest;
  Verdicts verdicts;
  std::string serial_detail;
  oracle::BatchOfReport batch_of;
  oracle::CheckResult single_graph;
  oracle::CheckResult loi_monotone;
  std::optional<oracle::DistReport> dist;
  std::vector<PhaseRow> phases;
  double fairness_wall_ms = 0;
  std::size_t injected = 0;
  std::size_t emitted_tx = 0;
  std::size_t stragglers = 0;
  double throughput_tps = 0;  // per simulated second
  double latency_mean_ms = 0;
  double latency_p50_ms = 0;
  double latency_max_ms = 0;
  std::size_t parked_total = 0;
  std::size_t stuck_diagnostics = 0;
  std::optional<baseline::FairDagOutcome> fairdag_unpatched, fairdag_patched;
  std::optional<baseline::DodOutcome> dod_buggy, dod_patched;

  std::string to_json() const;
};

RunReport run_config(const SimConfig& cfg, const std::string& name, const RunOptions& opt,
                     BaselineKind baseline = BaselineKind::kNone);
RunReport run_scenario(const std::string& name, std::uint64_t seed, const RunOptions& opt);

/// Replays committed subdags through a fresh pipeline. Returns the emitted
/// orders and the wall-clock spent in the pipeline.
struct Replay {
  std::vector<fairness::FinalOrder> emitted;
  std::vector<fairness::PhaseTimes> times;
  double wall_ms = 0;
};
Replay replay(const std::vector<CommittedSubdag>& committed, const Thresholds& th, bool serial,
              std::size_t threads);

std::string order_digest(const std::vector<fairness::FinalOrder>& orders);

/// Mean duration per phase from phase_timing events, in pipeline order.
/// tarjan_topo is reported on its own; extract, weights, tarjan_topo and
/// result make up the four headline phases.
std::vector<PhaseRow> phase_profile(const trace::RunTrace& trace);

struct SweepCell {
  std::uint32_t n = 5;
  std::uint32_t f = 1;
  double gamma = 1.0;
  std::uint32_t tx_count = 100;
  double interval_ms = 1.0;
};

struct SweepRow {
  SweepCell cell;
  bool skipped = false;
  std::string reason;
  std::size_t runs = 0;
  double throughput_tps = 0;
  double latency_mean_ms = 0;
  double fairness_wall_ms = 0;
  std::size_t verdict_failures = 0;
};

std::vector<SweepRow> sweep(const std::vector<SweepCell>& grid, const std::vector<std::uint64_t>& seeds,
                            const RunOptions& opt);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_metrics_csv(std::ostream& out, const RunReport& report);

/// Writes trace.jsonl, report.json, metrics.csv and dist.csv into `dir`.
void write_artifacts(const RunReport& report, const std::string& dir, bool with_trace);

}  // namespace herring::harness
