// Acceptance checks. One line per criterion; exit status is nonzero if any
// selected criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <thread>
#include <sstream>
#include <string>
#include <vector>

#include "herring/baselines.hpp"
#include "herring/harness.hpp"
#include "herring/oracle.hpp"
#include "herring/scenarios.hpp"

using namespace herring;

namespace {

// Tolerances and sizes.
constexpr std::size_t kSweepRuns = 200;
constexpr std::uint32_t kSweepTx = 100;
constexpr double kSweepBudgetS = 300.0;
constexpr std::size_t kFairDagHorizon = 1000;
constexpr std::size_t kPhaseRuns = 5;
constexpr std::size_t kPhaseMinBatch = 100;
constexpr double kMinSpeedup = 1.5;
constexpr std::size_t kSpeedupThreads = 4;
constexpr std::size_t kSpeedupMinSubdags = 8;
constexpr std::size_t kSpeedupMinTx = 200;
constexpr double kEps = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

harness::RunOptions quiet() {
  harness::RunOptions o;
  o.write_trace = false;
  return o;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct SweepRun {
  std::uint32_t n, f;
  double gamma;
  std::uint64_t seed;
  harness::RunReport report;
};

std::uint32_t max_f(std::uint32_t n, double gamma) {
  for (std::uint32_t f = n; f-- > 0;) {
    try {
      Thresholds::make(n, f, gamma);
      return f;
    } catch (const ConfigError&) {
    }
  }
  return 0;
}

double sweep_seconds = 0;

const std::vector<SweepRun>& sweep_runs() {
  static std::vector<SweepRun> runs = [] {
    std::vector<SweepRun> out;
    std::vector<std::pair<std::uint32_t, double>> cells;
    for (double g : {1.0, 0.8})
      for (std::uint32_t n : {5u, 9u, 13u}) cells.emplace_back(n, g);
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < kSweepRuns; ++i) {
      auto [n, g] = cells[i % cells.size()];
      std::uint32_t f = max_f(n, g);
      std::uint64_t seed = 1000 + i;
      std::uint32_t crashes = f ? static_cast<std::uint32_t>(seed % (f + 1)) : 0;
      auto cfg = sweep_config(n, f, g, seed, kSweepTx, crashes);
      out.push_back({n, f, g, seed, harness::run_config(cfg, "sweep", quiet())});
    }
    sweep_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }();
  return runs;
}

Outcome c1_serial_equivalence() {
  const auto& runs = sweep_runs();
  std::size_t bad = 0;
  std::string first;
  for (const auto& r : runs)
    if (!r.report.verdicts.serial_equivalence) {
      if (!bad++) first = fmt(" first n=%u f=%u gamma=%.1f seed=%llu: %s", r.n, r.f, r.gamma,
                              (unsigned long long)r.seed, r.report.serial_detail.c_str());
    }
  bool pass = bad == 0 && runs.size() == kSweepRuns && sweep_seconds < kSweepBudgetS;
  return {pass, fmt("%zu runs, %zu mismatches, %.1fs (budget %.0fs)", runs.size(), bad, sweep_seconds,
                    kSweepBudgetS) + first};
}

Outcome c2_batch_of() {
  std::size_t violations = 0, checked = 0;
  for (const auto& r : sweep_runs()) {
    violations += r.report.batch_of.violations.size();
    checked += r.report.batch_of.checked_pairs;
  }
  std::string rev;
  for (auto name : {"reversing_fig8_f0", "reversing_fig8_f2", "reversing_fig8"}) {
    auto rep = harness::run_scenario(name, 1, quiet());
    violations += rep.batch_of.violations.size();
    checked += rep.batch_of.checked_pairs;
    rev += fmt(" %s=%zu", name, rep.batch_of.violations.size());
  }
  return {violations == 0 && checked > 0,
          fmt("%zu violations over %zu checked pairs;", violations, checked) + rev};
}

Outcome c3_single_graph_loi() {
  std::size_t sg = 0, loi = 0;
  for (const auto& r : sweep_runs()) {
    sg += !r.report.single_graph.ok;
    loi += !r.report.loi_monotone.ok;
  }
  auto s = build_scenario("ablation_noselfref", 1);
  auto ablation = harness::run_config(s.config, s.name, quiet());
  s.config.self_reference = true;
  auto control = harness::run_config(s.config, s.name, quiet());
  bool pass = sg == 0 && loi == 0 && !ablation.loi_monotone.ok && control.loi_monotone.ok;
  return {pass, fmt("sweep single-graph failures %zu, LOI failures %zu; ablation LOI %s, control LOI %s",
                    sg, loi, ablation.loi_monotone.ok ? "pass" : "fail",
                    control.loi_monotone.ok ? "pass" : "fail")};
}

Outcome c4_crash_stragglers() {
  auto rep = harness::run_scenario("crash_n13", 1, quiet());
  bool pass = rep.stragglers == 0 && rep.sim.all_emitted && rep.verdicts.all();
  return {pass, fmt("injected %zu, emitted %zu, stragglers %zu", rep.injected, rep.emitted_tx,
                    rep.stragglers)};
}

Outcome c5_fairdag() {
  auto u = baseline::run_fairdag_attack(baseline::FairDagMode::kUnpatched, kFairDagHorizon);
  auto p = baseline::run_fairdag_attack(baseline::FairDagMode::kPatched, kFairDagHorizon);
  auto h = harness::run_scenario("fairdag_b1", 1, quiet());
  bool pass = u.weight_ab == 1 && u.weight_ba == 1 && !u.edge_added && !u.finalized &&
              u.rounds == kFairDagHorizon && p.weight_ab == 2 && p.edge_added && p.finalized &&
              h.verdicts.all() && h.stragglers == 0;
  return {pass, fmt("unpatched w=%u/%u edge=%d finalized=%d after %zu rounds; patched w(a,b)=%u "
                    "finalized=%d; herring emitted %zu/%zu",
                    u.weight_ab, u.weight_ba, u.edge_added, u.finalized, u.rounds, p.weight_ab,
                    p.finalized, h.emitted_tx, h.injected)};
}

Outcome c6_dod() {
  auto b = baseline::run_dod_scenario(baseline::DodMode::kBuggy);
  auto p = baseline::run_dod_scenario(baseline::DodMode::kExplicitPatch);
  auto h = harness::run_scenario("dod_b2", 1, quiet());
  bool pass = b.w_ab == 1 && b.w_ba == 1 && !b.reached_threshold && b.queue_stalled &&
              !p.queue_stalled && p.queued == 0 && h.verdicts.all() && h.stragglers == 0;
  return {pass, fmt("buggy w=%u/%u tau=%u stalled=%d; patched stalled=%d executed=%zu; herring "
                    "emitted %zu/%zu",
                    b.w_ab, b.w_ba, b.threshold, b.queue_stalled, p.queue_stalled, p.executed,
                    h.emitted_tx, h.injected)};
}

Outcome c7_condorcet() {
  auto s = build_scenario("condorcet_minimal", 1);
  auto rep = harness::run_config(s.config, s.name, quiet());
  auto ref = oracle::serial_reference(rep.sim.committed, s.config.thresholds());
  bool one_batch = rep.emitted.size() == 1 && rep.emitted[0].batch_sizes == std::vector<std::uint32_t>{3};
  bool weights = !ref.graphs.empty() && ref.graphs[0].admitted.size() == 3;
  if (weights) {
    const auto& g = ref.graphs[0];
    for (std::size_t u = 0; u < 3; ++u)
      for (std::size_t v = u + 1; v < 3; ++v) {
        auto a = g.w(u, v), b = g.w(v, u);
        weights = weights && std::max(a, b) == 2 && std::min(a, b) == 1;
      }
  }
  return {one_batch && weights && rep.verdicts.all(),
          fmt("batches %zu, first batch size %u, pairwise weights 2/1 %s",
              rep.emitted.empty() ? 0 : rep.emitted[0].batch_sizes.size(),
              rep.emitted.empty() || rep.emitted[0].batch_sizes.empty() ? 0
                                                                         : rep.emitted[0].batch_sizes[0],
              weights ? "yes" : "no")};
}

Outcome c8_dist() {
  auto rep = harness::run_scenario("reversing_fig8", 1, quiet());
  if (!rep.dist) return {false, "no histogram"};
  const auto& d = *rep.dist;
  bool mono = true;
  double prev = 2.0;
  std::size_t cert_rev = 0;
  for (const auto& b : d.buckets) {
    if (b.reversed_fraction() > prev + kEps) mono = false;
    prev = b.reversed_fraction();
    cert_rev += b.certified_reversed;
  }
  bool at_n = !d.buckets.empty() && d.buckets.back().dist == d.n &&
              d.buckets.back().reversed_fraction() == 0.0;
  std::ostringstream csv;
  oracle::write_dist_csv(csv, d);
  bool schema = csv.str().rfind("dist_bucket,pair_count,reversed_fraction\n", 0) == 0;
  std::string hist;
  for (const auto& b : d.buckets) hist += fmt(" %u:%.3f", b.dist, b.reversed_fraction());
  return {mono && at_n && cert_rev == 0 && schema,
          fmt("monotone=%d zero_at_N=%d certified_reversed=%zu csv=%d;", mono, at_n, cert_rev, schema) +
              hist};
}

Outcome c9_phase_profile() {
  double weights = 0, tarjan = 0;
  std::size_t nw = 0, nt = 0;
  for (std::size_t s = 1; s <= kPhaseRuns; ++s) {
    auto cfg = sweep_config(13, 3, 1.0, s, 3000, 0);
    cfg.workload.interval_ms = 0.2;
    auto r = sim::Simulator(cfg, "phase").run();
    std::map<SubdagId, std::size_t> admitted;
    for (const auto* e : r.trace.of<trace::GraphBuilt>()) {
      const auto& g = std::get<trace::GraphBuilt>(e->payload);
      admitted[g.r] = g.admitted;
    }
    for (const auto* e : r.trace.of<trace::PhaseTiming>()) {
      const auto& p = std::get<trace::PhaseTiming>(e->payload);
      if (admitted[p.r] < kPhaseMinBatch) continue;
      if (p.phase == "weights") weights += double(p.ns), ++nw;
      if (p.phase == "tarjan_topo") tarjan += double(p.ns), ++nt;
    }
  }
  if (!nw || !nt) return {false, "no subdags at the batch size"};
  double mw = weights / double(nw), mt = tarjan / double(nt);
  return {mw > mt, fmt("weights mean %.0f ns, tarjan_topo mean %.0f ns over %zu graphs", mw, mt, nw)};
}

Outcome c10_speedup() {
  auto cfg = sweep_config(13, 3, 1.0, 1, 4000, 0);
  cfg.workload.interval_ms = 0.5;
  cfg.max_rounds = 200;
  auto r = sim::Simulator(cfg, "speedup").run();
  std::map<SubdagId, std::size_t> admitted;
  for (const auto* e : r.trace.of<trace::GraphBuilt>()) {
    const auto& g = std::get<trace::GraphBuilt>(e->payload);
    admitted[g.r] = g.admitted;
  }
  std::size_t big = 0;
  for (auto [id, a] : admitted) big += a >= kSpeedupMinTx;
  auto th = cfg.thresholds();
  double best_serial = 1e300, best_conc = 1e300;
  std::string ds, dc;
  for (int rep = 0; rep < 3; ++rep) {
    auto s = harness::replay(r.committed, th, true, 1);
    auto c = harness::replay(r.committed, th, false, kSpeedupThreads);
    best_serial = std::min(best_serial, s.wall_ms);
    best_conc = std::min(best_conc, c.wall_ms);
    ds = harness::order_digest(s.emitted);
    dc = harness::order_digest(c.emitted);
  }
  double speedup = best_serial / best_conc;
  bool pass = big >= kSpeedupMinSubdags && ds == dc && speedup >= kMinSpeedup;
  return {pass, fmt("%zu subdags of >= %zu tx, serial %.1f ms, %zu threads %.1f ms, speedup %.2fx "
                    "(need %.1fx), digests %s, hardware threads %u",
                    big, kSpeedupMinTx, best_serial, kSpeedupThreads, best_conc, speedup, kMinSpeedup,
                    ds == dc ? "match" : "differ", std::thread::hardware_concurrency())};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"concurrent pipeline equals serial reference on 200 sweep runs", c1_serial_equivalence},
      {"no batch order-fairness violations", c2_batch_of},
      {"single-graph and LOI checks; ablation trips LOI", c3_single_graph_loi},
      {"crash_n13 leaves no stragglers", c4_crash_stragglers},
      {"FairDAG weight-loss stall and patch", c5_fairdag},
      {"DoD missing-edge stall and explicit patch", c6_dod},
      {"Condorcet cycle emitted as one batch", c7_condorcet},
      {"Dist histogram monotone, certified pairs never reversed", c8_dist},
      {"weights phase dominates tarjan_topo", c9_phase_profile},
      {"concurrent speedup with identical order", c10_speedup},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %zu %s: %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
