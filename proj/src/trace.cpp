#include "herring/trace.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace herring::trace {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

json digests_json(const std::vector<Digest>& ds) {
  json a = json::array();
  for (const auto& d : ds) a.push_back(d.hex());
  return a;
}

std::vector<Digest> digests_from(const json& a) {
  std::vector<Digest> out;
  for (const auto& s : a) out.push_back(Digest::from_hex(s.get<std::string>()));
  return out;
}

json edges_json(const std::vector<DirectedEdge>& es) {
  json a = json::array();
  for (const auto& e : es) a.push_back({e.from.hex(), e.to.hex()});
  return a;
}

std::vector<DirectedEdge> edges_from(const json& a) {
  std::vector<DirectedEdge> out;
  for (const auto& e : a)
    out.push_back({Digest::from_hex(e.at(0).get<std::string>()),
                   Digest::from_hex(e.at(1).get<std::string>())});
  return out;
}

json vertex_json(const CommittedVertex& v) {
  json entries = json::array();
  for (const auto& e : v.contribution) entries.push_back({e.tx.hex(), e.loi});
  json votes = json::array();
  for (const auto& vote : v.votes)
    votes.push_back({{"target", vote.target}, {"author", vote.author}, {"edges", edges_json(vote.edges)}});
  return {{"author", v.author}, {"round", v.round}, {"entries", entries}, {"votes", votes}};
}

CommittedVertex vertex_from(const json& j) {
  CommittedVertex v;
  v.author = j.at("author").get<ReplicaId>();
  v.round = j.at("round").get<Round>();
  for (const auto& e : j.at("entries"))
    v.contribution.push_back({Digest::from_hex(e.at(0).get<std::string>()), e.at(1).get<Loi>()});
  for (const auto& vote : j.at("votes"))
    v.votes.push_back({vote.at("target").get<SubdagId>(), vote.at("author").get<ReplicaId>(),
                       edges_from(vote.at("edges"))});
  return v;
}

FaultStrategy strategy_from(const std::string& s) {
  if (s == "silent_crash") return FaultStrategy::kSilentCrash;
  if (s == "reverse_local_order") return FaultStrategy::kReverseLocalOrder;
  throw ConfigError("faults", "unknown strategy " + s);
}

}  // namespace

const char* kind_name(const Payload& p) {
  return std::visit(Overload{
                        [](const RunStarted&) { return "run_started"; },
                        [](const TxInjected&) { return "tx_injected"; },
                        [](const TxReceived&) { return "tx_received"; },
                        [](const VertexCreated&) { return "vertex_created"; },
                        [](const CertificateFormed&) { return "certificate_formed"; },
                        [](const SubdagCommitted&) { return "subdag_committed"; },
                        [](const VoteCast&) { return "vote_cast"; },
                        [](const GraphBuilt&) { return "graph_built"; },
                        [](const GraphParked&) { return "graph_parked"; },
                        [](const OrderEmitted&) { return "order_emitted"; },
                        [](const PhaseTiming&) { return "phase_timing"; },
                        [](const Diagnostic&) { return "diagnostic"; },
                    },
                    p);
}

std::string event_to_json(const Event& e) {
  json j;
  j["kind"] = kind_name(e.payload);
  j["t"] = e.t;
  j["replica"] = e.replica == kNoReplica ? json(nullptr) : json(e.replica);
  std::visit(Overload{
                 [&](const RunStarted& p) {
                   j["n"] = p.n;
                   j["f"] = p.f;
                   j["gamma"] = p.gamma;
                   j["scenario"] = p.scenario;
                   json fa = json::array();
                   for (const auto& fe : p.faults)
                     fa.push_back({{"replica", fe.replica},
                                   {"strategy", to_string(fe.strategy)},
                                   {"activation_round", fe.activation_round}});
                   j["faults"] = fa;
                 },
                 [&](const TxInjected& p) {
                   j["tx"] = p.tx.hex();
                   j["body"] = p.body;
                 },
                 [&](const TxReceived& p) {
                   j["tx"] = p.tx.hex();
                   j["loi"] = p.loi;
                   j["via"] = p.via_client ? "client" : "batch";
                 },
                 [&](const VertexCreated& p) {
                   j["round"] = p.round;
                   j["parents"] = p.parents;
                   j["direct"] = p.direct;
                   j["indirect"] = p.indirect;
                   j["votes"] = p.votes;
                 },
                 [&](const CertificateFormed& p) {
                   j["round"] = p.round;
                   j["attestors"] = p.attestors;
                 },
                 [&](const SubdagCommitted& p) {
                   j["r"] = p.subdag.id;
                   j["leader"] = p.subdag.leader;
                   j["leader_round"] = p.subdag.leader_round;
                   json vs = json::array();
                   for (const auto& v : p.subdag.vertices) vs.push_back(vertex_json(v));
                   j["vertices"] = vs;
                 },
                 [&](const VoteCast& p) {
                   j["r"] = p.target;
                   j["edges"] = edges_json(p.edges);
                 },
                 [&](const GraphBuilt& p) {
                   j["r"] = p.r;
                   j["v"] = p.admitted;
                   j["m"] = p.missing;
                   j["anchor"] = p.anchor ? json(*p.anchor + 1) : json(nullptr);
                   j["k"] = p.retained.size();
                   j["retained"] = digests_json(p.retained);
                   j["solid"] = digests_json(p.solid);
                 },
                 [&](const GraphParked& p) {
                   j["r"] = p.r;
                   json m = json::array();
                   for (const auto& pr : p.missing) m.push_back({pr.first.hex(), pr.second.hex()});
                   j["missing"] = m;
                 },
                 [&](const OrderEmitted& p) {
                   j["r"] = p.order.r;
                   j["position"] = p.position;
                   j["end"] = p.position + p.order.digests.size();
                   j["digests"] = digests_json(p.order.digests);
                   j["batches"] = p.order.batch_sizes;
                 },
                 [&](const PhaseTiming& p) {
                   j["r"] = p.r;
                   j["phase"] = p.phase;
                   j["ns"] = p.ns;
                 },
                 [&](const Diagnostic& p) {
                   j["diag"] = p.kind;
                   j["message"] = p.message;
                 },
             },
             e.payload);
  return j.dump();
}

Event event_from_json(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& err) {
    throw ConfigError("trace", err.what());
  }
  Event e;
  try {
    e.t = j.at("t").get<SimTime>();
    e.replica = j.at("replica").is_null() ? kNoReplica : j.at("replica").get<ReplicaId>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "run_started") {
      RunStarted p;
      p.n = j.at("n").get<std::uint32_t>();
      p.f = j.at("f").get<std::uint32_t>();
      p.gamma = j.at("gamma").get<double>();
      p.scenario = j.value("scenario", "");
      for (const auto& fe : j.at("faults"))
        p.faults.push_back({fe.at("replica").get<ReplicaId>(),
                            strategy_from(fe.at("strategy").get<std::string>()),
                            fe.at("activation_round").get<Round>()});
      e.payload = std::move(p);
    } else if (kind == "tx_injected") {
      e.payload = TxInjected{Digest::from_hex(j.at("tx").get<std::string>()), j.value("body", "")};
    } else if (kind == "tx_received") {
      e.payload = TxReceived{Digest::from_hex(j.at("tx").get<std::string>()), j.at("loi").get<Loi>(),
                             j.at("via").get<std::string>() == "client"};
    } else if (kind == "vertex_created") {
      e.payload = VertexCreated{j.at("round").get<Round>(), j.at("parents").get<std::vector<ReplicaId>>(),
                                j.at("direct").get<std::size_t>(), j.at("indirect").get<std::size_t>(),
                                j.at("votes").get<std::size_t>()};
    } else if (kind == "certificate_formed") {
      e.payload = CertificateFormed{j.at("round").get<Round>(), j.at("attestors").get<std::size_t>()};
    } else if (kind == "subdag_committed") {
      SubdagCommitted p;
      p.subdag.id = j.at("r").get<SubdagId>();
      p.subdag.leader = j.at("leader").get<ReplicaId>();
      p.subdag.leader_round = j.at("leader_round").get<Round>();
      p.subdag.commit_time = e.t;
      for (const auto& v : j.at("vertices")) p.subdag.vertices.push_back(vertex_from(v));
      e.payload = std::move(p);
    } else if (kind == "vote_cast") {
      e.payload = VoteCast{j.at("r").get<SubdagId>(), edges_from(j.at("edges"))};
    } else if (kind == "graph_built") {
      GraphBuilt p;
      p.r = j.at("r").get<SubdagId>();
      p.admitted = j.at("v").get<std::size_t>();
      p.missing = j.at("m").get<std::size_t>();
      if (!j.at("anchor").is_null()) p.anchor = j.at("anchor").get<std::size_t>() - 1;
      p.retained = digests_from(j.at("retained"));
      p.solid = digests_from(j.at("solid"));
      e.payload = std::move(p);
    } else if (kind == "graph_parked") {
      GraphParked p;
      p.r = j.at("r").get<SubdagId>();
      for (const auto& m : j.at("missing"))
        p.missing.push_back(TxPair::make(Digest::from_hex(m.at(0).get<std::string>()),
                                         Digest::from_hex(m.at(1).get<std::string>())));
      e.payload = std::move(p);
    } else if (kind == "order_emitted") {
      OrderEmitted p;
      p.order.r = j.at("r").get<SubdagId>();
      p.position = j.at("position").get<std::uint64_t>();
      p.order.digests = digests_from(j.at("digests"));
      p.order.batch_sizes = j.at("batches").get<std::vector<std::uint32_t>>();
      e.payload = std::move(p);
    } else if (kind == "phase_timing") {
      e.payload = PhaseTiming{j.at("r").get<SubdagId>(), j.at("phase").get<std::string>(),
                              j.at("ns").get<std::int64_t>()};
    } else if (kind == "diagnostic") {
      e.payload = Diagnostic{j.at("diag").get<std::string>(), j.at("message").get<std::string>()};
    } else {
      throw ConfigError("kind", "unknown trace event kind '" + kind + "'");
    }
  } catch (const json::exception& err) {
    throw ConfigError("trace", err.what());
  }
  return e;
}

const RunStarted* RunTrace::header() const {
  for (const auto& e : events_)
    if (auto* p = std::get_if<RunStarted>(&e.payload)) return p;
  return nullptr;
}

std::vector<CommittedSubdag> RunTrace::committed() const {
  std::vector<CommittedSubdag> out;
  for (const auto& e : events_)
    if (auto* p = std::get_if<SubdagCommitted>(&e.payload)) out.push_back(p->subdag);
  return out;
}

std::vector<fairness::FinalOrder> RunTrace::emitted_orders() const {
  std::vector<fairness::FinalOrder> out;
  for (const auto& e : events_)
    if (auto* p = std::get_if<OrderEmitted>(&e.payload)) out.push_back(p->order);
  return out;
}

std::vector<Digest> RunTrace::emitted_log() const {
  std::vector<Digest> out;
  for (const auto& e : events_)
    if (auto* p = std::get_if<OrderEmitted>(&e.payload))
      out.insert(out.end(), p->order.digests.begin(), p->order.digests.end());
  return out;
}

std::vector<ReplicaId> RunTrace::faulty() const {
  std::vector<ReplicaId> out;
  if (const auto* h = header())
    for (const auto& fe : h->faults) out.push_back(fe.replica);
  return out;
}

void RunTrace::write_jsonl(std::ostream& out) const {
  for (const auto& e : events_) out << event_to_json(e) << '\n';
}

RunTrace RunTrace::read_jsonl(std::istream& in) {
  RunTrace t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.events_.push_back(event_from_json(line));
  }
  return t;
}

void RunTrace::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("out", "cannot write " + path);
  write_jsonl(out);
}

RunTrace RunTrace::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("trace", "cannot open " + path);
  return read_jsonl(in);
}

}  // namespace herring::trace
