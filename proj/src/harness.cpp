#include "herring/harness.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "json.hpp"

namespace herring::harness {

using nlohmann::json;

std::string order_digest(const std::vector<fairness::FinalOrder>& orders) {
  std::string bytes;
  for (const auto& o : orders) {
    std::size_t k = 0;
    for (std::uint32_t size : o.batch_sizes) {
      for (std::uint32_t j = 0; j < size; ++j, ++k)
        bytes.append(reinterpret_cast<const char*>(o.digests[k].bytes.data()), 32);
      bytes.push_back('|');
    }
  }
  return Digest::of(bytes).hex();
}

Replay replay(const std::vector<CommittedSubdag>& committed, const Thresholds& th, bool serial,
              std::size_t threads) {
  Replay out;
  fairness::PipelineOptions opt;
  opt.serial = serial;
  opt.threads = threads;
  auto t0 = std::chrono::steady_clock::now();
  {
    fairness::FairnessPipeline p(th, opt);
    p.on_phase_times = [&](const fairness::PhaseTimes& t) { out.times.push_back(t); };
    for (const auto& sd : committed)
      for (auto& o : p.on_commit(sd)) out.emitted.push_back(std::move(o));
    for (auto& o : p.flush()) out.emitted.push_back(std::move(o));
  }
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<PhaseRow> phase_profile(const trace::RunTrace& trace) {
  static const char* kOrder[] = {"extract", "weights", "build", "tarjan_topo", "chain", "finalize", "result"};
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto* e : trace.of<trace::PhaseTiming>()) {
    const auto& p = std::get<trace::PhaseTiming>(e->payload);
    auto& a = acc[p.phase];
    a.first += static_cast<double>(p.ns);
    ++a.second;
  }
  std::vector<PhaseRow> rows;
  for (const char* name : kOrder) {
    auto it = acc.find(name);
    if (it == acc.end()) continue;
    rows.push_back({name, it->second.first / it->second.second, it->second.second});
  }
  return rows;
}

namespace {

bool is_prefix(const std::vector<fairness::FinalOrder>& a, const std::vector<fairness::FinalOrder>& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

void fill_latency(RunReport& rep) {
  std::unordered_map<Digest, SimTime, DigestHash> injected_at;
  for (const auto* e : rep.sim.trace.of<trace::TxInjected>())
    injected_at.emplace(std::get<trace::TxInjected>(e->payload).tx, e->t);
  std::vector<double> lat;
  std::unordered_map<Digest, char, DigestHash> emitted;
  for (const auto* e : rep.sim.trace.of<trace::OrderEmitted>())
    for (const auto& d : std::get<trace::OrderEmitted>(e->payload).order.digests) {
      emitted.emplace(d, 1);
      auto it = injected_at.find(d);
      if (it != injected_at.end()) lat.push_back(static_cast<double>(e->t - it->second));
    }
  rep.injected = injected_at.size();
  rep.emitted_tx = emitted.size();
  rep.stragglers = 0;
  for (const auto& [d, t] : injected_at)
    if (!emitted.contains(d)) ++rep.stragglers;
  if (!lat.empty()) {
    std::sort(lat.begin(), lat.end());
    rep.latency_mean_ms = std::accumulate(lat.begin(), lat.end(), 0.0) / lat.size();
    rep.latency_p50_ms = lat[lat.size() / 2];
    rep.latency_max_ms = lat.back();
  }
  if (rep.sim.end_time > 0)
    rep.throughput_tps = rep.emitted_tx * 1000.0 / static_cast<double>(rep.sim.end_time);
}

json fairdag_json(const baseline::FairDagOutcome& o) {
  return {{"weight_ab", o.weight_ab}, {"weight_ba", o.weight_ba}, {"edge_added", o.edge_added},
          {"finalized", o.finalized}, {"stall", !o.finalized},    {"rounds", o.rounds}};
}

json dod_json(const baseline::DodOutcome& o) {
  return {{"w_ab", o.w_ab},
          {"w_ba", o.w_ba},
          {"threshold", o.threshold},
          {"reached_threshold", o.reached_threshold},
          {"queue_stalled", o.queue_stalled},
          {"executed", o.executed},
          {"queued", o.queued}};
}

}  // namespace

RunReport run_config(const SimConfig& cfg, const std::string& name, const RunOptions& opt,
                     BaselineKind baseline) {
  RunReport rep;
  rep.scenario = name;
  rep.config = cfg;
  rep.sim = sim::Simulator(cfg, name).run();
  const Thresholds th = cfg.thresholds();

  Replay rp = replay(rep.sim.committed, th, opt.serial, opt.threads);
  rep.emitted = std::move(rp.emitted);
  rep.fairness_wall_ms = rp.wall_ms;
  rep.order_digest = order_digest(rep.emitted);

  auto ref = oracle::serial_reference(rep.sim.committed, th);
  if (rep.emitted != ref.orders) {
    rep.verdicts.serial_equivalence = false;
    rep.serial_detail = "pipeline emitted " + std::to_string(rep.emitted.size()) +
                        " orders, reference " + std::to_string(ref.orders.size());
  } else if (!is_prefix(rep.sim.emitted, ref.orders)) {
    rep.verdicts.serial_equivalence = false;
    rep.serial_detail = "in-loop engine output is not a prefix of the reference";
  }

  rep.batch_of = oracle::check_batch_of(rep.sim.trace, rep.emitted, cfg.gamma);
  rep.verdicts.batch_of = rep.batch_of.ok();
  rep.single_graph = oracle::check_single_graph(rep.sim.trace);
  rep.verdicts.single_graph = rep.single_graph.ok;
  rep.loi_monotone = oracle::check_loi_monotone(rep.sim.trace);
  rep.verdicts.loi_monotone = rep.loi_monotone.ok;

  bool adversarial = std::any_of(cfg.faults.begin(), cfg.faults.end(), [](const FaultEntry& f) {
    return f.strategy == FaultStrategy::kReverseLocalOrder;
  });
  if (adversarial || opt.always_dist)
    rep.dist = oracle::dist_histogram(rep.sim.trace, rep.emitted, &ref, &th);

  rep.phases = phase_profile(rep.sim.trace);
  rep.parked_total = rep.sim.trace.of<trace::GraphParked>().size();
  rep.stuck_diagnostics = rep.sim.trace.of<trace::Diagnostic>().size();
  fill_latency(rep);

  if (baseline == BaselineKind::kFairDag) {
    rep.fairdag_unpatched = baseline::run_fairdag_attack(baseline::FairDagMode::kUnpatched);
    rep.fairdag_patched = baseline::run_fairdag_attack(baseline::FairDagMode::kPatched);
  } else if (baseline == BaselineKind::kDod) {
    rep.dod_buggy = baseline::run_dod_scenario(baseline::DodMode::kBuggy);
    rep.dod_patched = baseline::run_dod_scenario(baseline::DodMode::kExplicitPatch);
  }

  if (!opt.out_dir.empty()) write_artifacts(rep, opt.out_dir, opt.write_trace);
  return rep;
}

RunReport run_scenario(const std::string& name, std::uint64_t seed, const RunOptions& opt) {
  Scenario s = build_scenario(name, seed);
  return run_config(s.config, s.name, opt, s.baseline);
}

std::string RunReport::to_json() const {
  json j;
  j["scenario"] = scenario;
  j["config"] = json::parse(dump_config(config));
  j["order_digest"] = order_digest;
  j["verdicts"] = {{"serial_equivalence", verdicts.serial_equivalence},
                   {"batch_of", verdicts.batch_of},
                   {"single_graph", verdicts.single_graph},
                   {"loi_monotone", verdicts.loi_monotone},
                   {"all", verdicts.all()}};
  json details;
  if (!serial_detail.empty()) details["serial_equivalence"] = serial_detail;
  if (!single_graph.ok) details["single_graph"] = single_graph.detail;
  if (!loi_monotone.ok) details["loi_monotone"] = loi_monotone.detail;
  details["batch_of"] = {{"violations", batch_of.violations.size()},
                         {"checked_pairs", batch_of.checked_pairs},
                         {"skipped_pairs", batch_of.skipped_pairs}};
  j["verdict_details"] = details;

  json phase = json::array();
  for (const auto& p : phases)
    phase.push_back({{"phase", p.phase}, {"mean_ns", p.mean_ns}, {"samples", p.samples}});
  j["phases"] = phase;
  j["fairness_wall_ms"] = fairness_wall_ms;
  j["throughput_tps"] = throughput_tps;
  j["latency_ms"] = {{"mean", latency_mean_ms}, {"p50", latency_p50_ms}, {"max", latency_max_ms}};
  j["injected"] = injected;
  j["emitted"] = emitted_tx;
  j["stragglers"] = stragglers;
  j["committed_subdags"] = sim.committed.size();
  j["highest_round"] = sim.highest_round;
  j["simulated_ms"] = sim.end_time;
  j["parked_graphs"] = parked_total;
  j["diagnostics"] = stuck_diagnostics;
  if (dist) {
    json b = json::array();
    for (const auto& bk : dist->buckets)
      b.push_back({{"dist", bk.dist},
                   {"pairs", bk.pairs},
                   {"reversed", bk.reversed},
                   {"reversed_fraction", bk.reversed_fraction()},
                   {"certified", bk.certified},
                   {"certified_reversed", bk.certified_reversed}});
    j["dist"] = {{"buckets", b}, {"ties", dist->ties}, {"skipped", dist->skipped}};
  }
  if (fairdag_unpatched || dod_buggy) {
    json base;
    if (fairdag_unpatched) {
      base["unpatched"] = fairdag_json(*fairdag_unpatched);
      base["patched"] = fairdag_json(*fairdag_patched);
      base["stall"] = !fairdag_unpatched->finalized;
    }
    if (dod_buggy) {
      base["buggy"] = dod_json(*dod_buggy);
      base["explicit_patch"] = dod_json(*dod_patched);
      base["stall"] = dod_buggy->queue_stalled;
    }
    j["baseline"] = base;
  }
  return j.dump(2);
}

void write_metrics_csv(std::ostream& out, const RunReport& r) {
  out << "metric,value\n";
  out << "throughput_tps," << r.throughput_tps << '\n';
  out << "latency_mean_ms," << r.latency_mean_ms << '\n';
  out << "latency_p50_ms," << r.latency_p50_ms << '\n';
  out << "latency_max_ms," << r.latency_max_ms << '\n';
  out << "injected," << r.injected << '\n';
  out << "emitted," << r.emitted_tx << '\n';
  out << "stragglers," << r.stragglers << '\n';
  out << "committed_subdags," << r.sim.committed.size() << '\n';
  out << "parked_graphs," << r.parked_total << '\n';
  out << "fairness_wall_ms," << r.fairness_wall_ms << '\n';
  for (const auto& p : r.phases) out << "phase_" << p.phase << "_mean_ns," << p.mean_ns << '\n';
}

void write_artifacts(const RunReport& r, const std::string& dir, bool with_trace) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  if (with_trace) r.sim.trace.save((fs::path(dir) / "trace.jsonl").string());
  {
    std::ofstream out(fs::path(dir) / "report.json");
    out << r.to_json() << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "metrics.csv");
    write_metrics_csv(out, r);
  }
  if (r.dist) {
    std::ofstream out(fs::path(dir) / "dist.csv");
    oracle::write_dist_csv(out, *r.dist);
  }
}

std::vector<SweepRow> sweep(const std::vector<SweepCell>& grid, const std::vector<std::uint64_t>& seeds,
                            const RunOptions& opt) {
  std::vector<SweepRow> rows;
  RunOptions inner = opt;
  inner.out_dir.clear();
  for (const auto& cell : grid) {
    SweepRow row;
    row.cell = cell;
    try {
      Thresholds::make(cell.n, cell.f, cell.gamma);
    } catch (const ConfigError& e) {
      row.skipped = true;
      row.reason = e.what();
      rows.push_back(row);
      continue;
    }
    for (std::uint64_t seed : seeds) {
      SimConfig cfg = sweep_config(cell.n, cell.f, cell.gamma, seed, cell.tx_count, 0);
      cfg.workload.interval_ms = cell.interval_ms;
      RunReport r = run_config(cfg, "sweep", inner);
      ++row.runs;
      row.throughput_tps += r.throughput_tps;
      row.latency_mean_ms += r.latency_mean_ms;
      row.fairness_wall_ms += r.fairness_wall_ms;
      if (!r.verdicts.all()) ++row.verdict_failures;
    }
    if (row.runs) {
      row.throughput_tps /= row.runs;
      row.latency_mean_ms /= row.runs;
      row.fairness_wall_ms /= row.runs;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "n,f,gamma,tx_count,interval_ms,runs,throughput_tps,latency_mean_ms,fairness_wall_ms,"
         "verdict_failures,skipped,reason\n";
  for (const auto& r : rows) {
    std::string reason = r.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    out << r.cell.n << ',' << r.cell.f << ',' << r.cell.gamma << ',' << r.cell.tx_count << ','
        << r.cell.interval_ms << ',' << r.runs << ',' << r.throughput_tps << ','
        << r.latency_mean_ms << ',' << r.fairness_wall_ms << ',' << r.verdict_failures << ','
        << (r.skipped ? 1 : 0) << ',' << reason << '\n';
  }
}

}  // namespace herring::harness
