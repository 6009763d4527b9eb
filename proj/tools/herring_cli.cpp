#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "herring/harness.hpp"

using namespace herring;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

void print_summary(const harness::RunReport& r) {
  const auto& v = r.verdicts;
  std::cout << "scenario " << r.scenario << "  subdags " << r.sim.committed.size() << "  emitted "
            << r.emitted_tx << "/" << r.injected << "  digest " << r.order_digest.substr(0, 16)
            << "\n";
  std::cout << "  serial_equivalence " << (v.serial_equivalence ? "pass" : "FAIL")
            << "  batch_of " << (v.batch_of ? "pass" : "FAIL") << " ("
            << r.batch_of.checked_pairs << " pairs)"
            << "  single_graph " << (v.single_graph ? "pass" : "FAIL") << "  loi_monotone "
            << (v.loi_monotone ? "pass" : "FAIL") << "\n";
  if (!r.serial_detail.empty()) std::cout << "  " << r.serial_detail << "\n";
  if (!r.loi_monotone.ok) std::cout << "  " << r.loi_monotone.detail << "\n";
  if (!r.single_graph.ok) std::cout << "  " << r.single_graph.detail << "\n";
  if (r.fairdag_unpatched)
    std::cout << "  fairdag unpatched w(a,b)=" << r.fairdag_unpatched->weight_ab
              << " w(b,a)=" << r.fairdag_unpatched->weight_ba
              << " stall=" << (r.fairdag_unpatched->finalized ? "false" : "true")
              << "; patched w(a,b)=" << r.fairdag_patched->weight_ab
              << " finalized=" << (r.fairdag_patched->finalized ? "true" : "false") << "\n";
  if (r.dod_buggy)
    std::cout << "  dod buggy w(a,b)=" << r.dod_buggy->w_ab << " w(b,a)=" << r.dod_buggy->w_ba
              << " stalled=" << (r.dod_buggy->queue_stalled ? "true" : "false")
              << "; explicit patch stalled=" << (r.dod_patched->queue_stalled ? "true" : "false")
              << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Herring fairness-layer simulator"};
  app.require_subcommand(0, 1);

  std::string scenario, config_path, out_dir, trace = "on";
  bool serial = false;
  std::size_t threads = 4;
  std::uint64_t seed = 1;
  bool seed_set = false;

  auto add_common = [&](CLI::App* c) {
    c->add_flag("--serial", serial, "Run the fairness pipeline one subdag at a time");
    c->add_option("--threads", threads, "Worker threads for the concurrent pipeline")
        ->check(CLI::PositiveNumber);
    c->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { seed = s; seed_set = true; }, "Run seed");
    c->add_option("--out", out_dir, "Directory for trace.jsonl, report.json and CSV files");
    c->add_option("--trace", trace, "Write trace.jsonl (on/off)")
        ->check(CLI::IsMember({"on", "off"}));
  };

  // `run` is also the default when no subcommand is given.
  auto* run = app.add_subcommand("run", "Run one scenario or config file");
  for (auto* c : {&app, run}) {
    c->add_option("--scenario", scenario, "Library scenario name");
    c->add_option("--config", config_path, "JSON scenario config");
    add_common(c);
  }

  auto* sweep = app.add_subcommand("sweep", "Grid sweep, one CSV row per cell");
  std::string ns = "5", fs = "1", gammas = "1.0", txs = "100", rates = "1.0", seeds = "1,2,3";
  sweep->add_option("--n", ns, "Comma-separated replica counts");
  sweep->add_option("--f", fs, "Comma-separated fault budgets");
  sweep->add_option("--gamma", gammas, "Comma-separated gamma values");
  sweep->add_option("--tx", txs, "Comma-separated transaction counts");
  sweep->add_option("--interval", rates, "Comma-separated injection intervals (ms)");
  sweep->add_option("--seeds", seeds, "Comma-separated seeds");
  add_common(sweep);

  auto* profile = app.add_subcommand("profile", "Mean phase times of a trace");
  std::string trace_path;
  profile->add_option("trace", trace_path, "trace.jsonl")->required();

  auto* list = app.add_subcommand("list", "List library scenarios");

  CLI11_PARSE(app, argc, argv);

  harness::RunOptions opt;
  opt.serial = serial;
  opt.threads = threads;
  opt.out_dir = out_dir;
  opt.write_trace = trace == "on";

  try {
    if (list->parsed()) {
      for (const auto& n : scenario_names()) std::cout << n << "\n";
      return 0;
    }
    if (profile->parsed()) {
      auto t = trace::RunTrace::load(trace_path);
      std::cout << "phase,mean_ns,samples\n";
      for (const auto& p : harness::phase_profile(t))
        std::cout << p.phase << ',' << p.mean_ns << ',' << p.samples << "\n";
      return 0;
    }
    if (sweep->parsed()) {
      std::vector<harness::SweepCell> grid;
      for (double n : parse_list(ns))
        for (double f : parse_list(fs))
          for (double g : parse_list(gammas))
            for (double t : parse_list(txs))
              for (double iv : parse_list(rates))
                grid.push_back({static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(f), g,
                                static_cast<std::uint32_t>(t), iv});
      std::vector<std::uint64_t> seed_list;
      for (double s : parse_list(seeds)) seed_list.push_back(static_cast<std::uint64_t>(s));
      auto rows = harness::sweep(grid, seed_list, opt);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(std::filesystem::path(out_dir) / "sweep.csv");
        harness::write_sweep_csv(out, rows);
      }
      harness::write_sweep_csv(std::cout, rows);
      bool ok = std::all_of(rows.begin(), rows.end(),
                            [](const auto& r) { return r.verdict_failures == 0; });
      return ok ? 0 : 1;
    }

    if (scenario.empty() == config_path.empty()) {
      std::cerr << "give exactly one of --scenario or --config\n";
      return 2;
    }
    harness::RunReport rep;
    if (!scenario.empty()) {
      rep = harness::run_scenario(scenario, seed, opt);
    } else {
      SimConfig cfg = load_config(config_path);
      if (seed_set) cfg.seed = seed;
      rep = harness::run_config(cfg, config_path, opt);
    }
    print_summary(rep);
    return rep.verdicts.all() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
