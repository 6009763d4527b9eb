#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "herring/common.hpp"
#include "herring/config.hpp"
#include "herring/fairness_finalize.hpp"
#include "herring/subdag.hpp"

namespace herring::trace {

struct RunStarted {
  std::uint32_t n = 0;
  std::uint32_t f = 0;
  double gamma = 1.0;
  std::vector<FaultEntry> faults;
  std::string scenario;
};

struct TxInjected {
  Digest tx;
  std::string body;
};

struct TxReceived {
  Digest tx;
  Loi loi = 0;
  bool via_client = true;
};

struct VertexCreated {
  Round round = 0;
  std::vector<ReplicaId> parents;
  std::size_t direct = 0;
  std::size_t indirect = 0;
  std::size_t votes = 0;
};

struct CertificateFormed {
  Round round = 0;
  std::size_t attestors = 0;
};

struct SubdagCommitted {
  CommittedSubdag subdag;
};

struct VoteCast {
  SubdagId target = 0;
  std::vector<DirectedEdge> edges;
};

struct GraphBuilt {
  SubdagId r = 0;
  std::size_t admitted = 0;
  std::size_t missing = 0;
  std::optional<std::size_t> anchor;  // one-based in JSON
  std::vector<Digest> retained;
  std::vector<Digest> solid;
};

struct GraphParked {
  SubdagId r = 0;
  std::vector<TxPair> missing;
};

struct OrderEmitted {
  fairness::FinalOrder order;
  std::uint64_t position = 0;  // index of the first digest in the application log
};

struct PhaseTiming {
  SubdagId r = 0;
  std::string phase;
  std::int64_t ns = 0;
};

struct Diagnostic {
  std::string kind;
  std::string message;
};

using Payload = std::variant<RunStarted, TxInjected, TxReceived, VertexCreated, CertificateFormed,
                             SubdagCommitted, VoteCast, GraphBuilt, GraphParked, OrderEmitted,
                             PhaseTiming, Diagnostic>;

struct Event {
  SimTime t = 0;
  ReplicaId replica = kNoReplica;
  Payload payload;
};

const char* kind_name(const Payload& p);

/// Append-only record of one run.
class RunTrace {
 public:
  void add(SimTime t, ReplicaId replica, Payload p) {
    events_.push_back({t, replica, std::move(p)});
  }
  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  template <typename T>
  std::vector<const Event*> of() const {
    std::vector<const Event*> out;
    for (const auto& e : events_)
      if (std::holds_alternative<T>(e.payload)) out.push_back(&e);
    return out;
  }

  const RunStarted* header() const;
  /// Committed subdags in commit order.
  std::vector<CommittedSubdag> committed() const;
  /// Concatenated application log.
  std::vector<Digest> emitted_log() const;
  std::vector<fairness::FinalOrder> emitted_orders() const;
  /// Faulty replica ids taken from the header.
  std::vector<ReplicaId> faulty() const;

  void write_jsonl(std::ostream& out) const;
  static RunTrace read_jsonl(std::istream& in);
  void save(const std::string& path) const;
  static RunTrace load(const std::string& path);

 private:
  std::vector<Event> events_;
};

std::string event_to_json(const Event& e);
Event event_from_json(const std::string& line);

}  // namespace herring::trace
