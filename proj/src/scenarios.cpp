#include "herring/scenarios.hpp"

#include "herring/adversaries.hpp"

namespace herring {

namespace {

ClientDirective to(std::string body, std::vector<ReplicaId> targets, Round round) {
  return ClientDirective{std::move(body), std::move(targets), round};
}

SimConfig lockstep(std::uint32_t n, std::uint32_t f, double gamma, std::uint64_t seed) {
  SimConfig c;
  c.n = n;
  c.f = f;
  c.gamma = gamma;
  c.seed = seed;
  c.delivery_model = DeliveryModel::kLockstep;
  c.max_rounds = 40;
  return c;
}

Scenario fairdag_b1(std::uint64_t seed) {
  // The attack's delivery plan, widened to five replicas so the Herring
  // thresholds hold; the fifth replica crashes at once.
  Scenario s{"fairdag_b1", lockstep(5, 1, 1.0, seed), BaselineKind::kFairDag};
  auto& c = s.config;
  c.faults = {{4, FaultStrategy::kSilentCrash, 1}};
  c.directives = {to("x", {0, 1}, 1), to("a", {2}, 1), to("b", {2}, 1),
                  to("a", {0}, 2),    to("b", {0}, 2), to("b", {1}, 2),
                  to("a", {1}, 2),    to("y", {2}, 2)};
  return s;
}

Scenario dod_b2(std::uint64_t seed) {
  Scenario s{"dod_b2", lockstep(5, 1, 1.0, seed), BaselineKind::kDod};
  auto& c = s.config;
  c.faults = {{4, FaultStrategy::kSilentCrash, 1}};
  c.directives = {to("p", {}, 1),     to("a", {1}, 1), to("b", {2}, 1),
                  to("a", {0}, 2),    to("b", {0}, 2), to("b", {1}, 2),
                  to("a", {2}, 2),    to("b", {3}, 2), to("a", {3}, 2)};
  return s;
}

Scenario reversing(std::uint32_t f_actual, std::uint64_t seed) {
  std::string name = "reversing_fig8";
  if (f_actual != 5) name += "_f" + std::to_string(f_actual);
  Scenario s{name, {}, BaselineKind::kNone};
  auto& c = s.config;
  c.n = 21;
  c.f = 5;
  c.gamma = 1.0;
  c.seed = seed;
  c.max_rounds = 40;
  c.delay_min_ms = 2;
  c.delay_max_ms = 12;
  c.faults = adversary::reversing_schedule(c.n, f_actual);
  c.workload.tx_count = 120;
  c.workload.interval_ms = 1.5;
  c.workload.jitter_ms = 8;
  return s;
}

Scenario crash_n13(std::uint64_t seed) {
  Scenario s{"crash_n13", {}, BaselineKind::kNone};
  auto& c = s.config;
  c.n = 13;
  c.f = 3;
  c.gamma = 1.0;
  c.seed = seed;
  c.max_rounds = 60;
  c.faults = adversary::random_crash_schedule(13, 3, 20, seed);
  c.workload.tx_count = 2000;
  c.workload.interval_ms = 0.5;
  c.workload.jitter_ms = 10;
  return s;
}

Scenario condorcet(std::uint64_t seed) {
  Scenario s{"condorcet_minimal", lockstep(3, 0, 2.0 / 3.0, seed), BaselineKind::kNone};
  auto& c = s.config;
  c.directives = {to("a", {0}, 1), to("b", {0}, 1), to("c", {0}, 1),
                  to("b", {1}, 1), to("c", {1}, 1), to("a", {1}, 1),
                  to("c", {2}, 1), to("a", {2}, 1), to("b", {2}, 1)};
  return s;
}

Scenario ablation(std::uint64_t seed) {
  Scenario s{"ablation_noselfref", {}, BaselineKind::kNone};
  auto& c = s.config;
  c.n = 5;
  c.f = 1;
  c.gamma = 1.0;
  c.seed = seed;
  c.max_rounds = 40;
  c.self_reference = false;
  c.parent_wait_ms = 0;
  c.delay_min_ms = 2;
  c.delay_max_ms = 20;
  c.outbound_extra_ms = {{0, 12}};
  c.workload.tx_count = 150;
  c.workload.interval_ms = 2.0;
  c.workload.jitter_ms = 5;
  return s;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"fairdag_b1",        "dod_b2",           "reversing_fig8", "reversing_fig8_f0",
          "reversing_fig8_f2", "crash_n13",        "condorcet_minimal", "ablation_noselfref"};
}

Scenario build_scenario(const std::string& name, std::uint64_t seed) {
  if (name == "fairdag_b1") return fairdag_b1(seed);
  if (name == "dod_b2") return dod_b2(seed);
  if (name == "reversing_fig8") return reversing(5, seed);
  if (name == "reversing_fig8_f0") return reversing(0, seed);
  if (name == "reversing_fig8_f2") return reversing(2, seed);
  if (name == "crash_n13") return crash_n13(seed);
  if (name == "condorcet_minimal") return condorcet(seed);
  if (name == "ablation_noselfref") return ablation(seed);
  throw ConfigError("scenario", "unknown scenario '" + name + "'");
}

SimConfig sweep_config(std::uint32_t n, std::uint32_t f, double gamma, std::uint64_t seed,
                       std::uint32_t tx_count, std::uint32_t crashes) {
  SimConfig c;
  c.n = n;
  c.f = f;
  c.gamma = gamma;
  c.seed = seed;
  c.max_rounds = 50;
  c.faults = adversary::random_crash_schedule(n, crashes, 15, seed);
  c.workload.tx_count = tx_count;
  c.workload.interval_ms = 1.0;
  c.workload.jitter_ms = 12;
  return c;
}

}  // namespace herring
