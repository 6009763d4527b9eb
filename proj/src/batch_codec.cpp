#include "herring/worker.hpp"

#include "json.hpp"

namespace herring::worker {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void digest(const Digest& d) { out_.insert(out_.end(), d.bytes.begin(), d.bytes.end()); }
  void bytes(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_++]} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_++]} << (8 * i);
    return v;
  }
  Digest digest() {
    need(32);
    Digest d;
    std::copy_n(in_.begin() + static_cast<std::ptrdiff_t>(pos_), 32, d.bytes.begin());
    pos_ += 32;
    return d;
  }
  std::string bytes() {
    std::uint32_t len = u32();
    need(len);
    std::string s(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  in_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
    pos_ += len;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t k) const {
    if (pos_ + k > in_.size()) throw ConfigError("batch", "truncated binary batch");
  }
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

constexpr std::uint32_t kMagic = 0x48424154;  // "HBAT"

}  // namespace

std::vector<std::uint8_t> encode_binary(const Batch& batch) {
  Writer w;
  w.u32(kMagic);
  w.u32(batch.author);
  w.u64(batch.sequence);
  w.u32(static_cast<std::uint32_t>(batch.direct_entries.size()));
  for (const auto& e : batch.direct_entries) {
    w.bytes(e.tx.body);
    w.digest(e.tx.digest);
    w.u64(e.loi);
  }
  w.u32(static_cast<std::uint32_t>(batch.indirect_entries.size()));
  for (const auto& e : batch.indirect_entries) {
    w.digest(e.tx);
    w.u64(e.loi);
  }
  w.u32(static_cast<std::uint32_t>(batch.votes.size()));
  for (const auto& v : batch.votes) {
    w.u64(v.target);
    w.u32(v.author);
    w.u32(static_cast<std::uint32_t>(v.edges.size()));
    for (const auto& e : v.edges) {
      w.digest(e.from);
      w.digest(e.to);
    }
  }
  return w.take();
}

Batch decode_binary(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (r.u32() != kMagic) throw ConfigError("batch", "bad magic");
  Batch b;
  b.author = r.u32();
  b.sequence = r.u64();
  std::uint32_t nd = r.u32();
  for (std::uint32_t i = 0; i < nd; ++i) {
    DirectEntry e;
    e.tx.body = r.bytes();
    e.tx.digest = r.digest();
    e.loi = r.u64();
    b.direct_entries.push_back(std::move(e));
  }
  std::uint32_t ni = r.u32();
  for (std::uint32_t i = 0; i < ni; ++i) {
    OrderEntry e;
    e.tx = r.digest();
    e.loi = r.u64();
    b.indirect_entries.push_back(e);
  }
  std::uint32_t nv = r.u32();
  for (std::uint32_t i = 0; i < nv; ++i) {
    FairUpdateVote v;
    v.target = r.u64();
    v.author = r.u32();
    std::uint32_t ne = r.u32();
    for (std::uint32_t k = 0; k < ne; ++k) {
      DirectedEdge e;
      e.from = r.digest();
      e.to = r.digest();
      v.edges.push_back(e);
    }
    b.votes.push_back(std::move(v));
  }
  if (!r.done()) throw ConfigError("batch", "trailing bytes");
  return b;
}

std::string encode_json(const Batch& batch) {
  using nlohmann::json;
  json j;
  j["author"] = batch.author;
  j["sequence"] = batch.sequence;
  j["direct"] = json::array();
  for (const auto& e : batch.direct_entries)
    j["direct"].push_back({{"body", e.tx.body}, {"digest", e.tx.digest.hex()}, {"loi", e.loi}});
  j["indirect"] = json::array();
  for (const auto& e : batch.indirect_entries)
    j["indirect"].push_back({{"digest", e.tx.hex()}, {"loi", e.loi}});
  j["votes"] = json::array();
  for (const auto& v : batch.votes) {
    json edges = json::array();
    for (const auto& e : v.edges) edges.push_back({e.from.hex(), e.to.hex()});
    j["votes"].push_back({{"target", v.target}, {"author", v.author}, {"edges", edges}});
  }
  return j.dump();
}

Batch decode_json(const std::string& text) {
  using nlohmann::json;
  Batch b;
  try {
    json j = json::parse(text);
    b.author = j.at("author").get<ReplicaId>();
    b.sequence = j.at("sequence").get<std::uint64_t>();
    for (const auto& e : j.at("direct")) {
      DirectEntry d;
      d.tx.body = e.at("body").get<std::string>();
      d.tx.digest = Digest::from_hex(e.at("digest").get<std::string>());
      d.loi = e.at("loi").get<Loi>();
      b.direct_entries.push_back(std::move(d));
    }
    for (const auto& e : j.at("indirect"))
      b.indirect_entries.push_back(
          {Digest::from_hex(e.at("digest").get<std::string>()), e.at("loi").get<Loi>()});
    for (const auto& v : j.at("votes")) {
      FairUpdateVote vote;
      vote.target = v.at("target").get<SubdagId>();
      vote.author = v.at("author").get<ReplicaId>();
      for (const auto& e : v.at("edges"))
        vote.edges.push_back({Digest::from_hex(e.at(0).get<std::string>()),
                              Digest::from_hex(e.at(1).get<std::string>())});
      b.votes.push_back(std::move(vote));
    }
  } catch (const json::exception& e) {
    throw ConfigError("batch", e.what());
  }
  return b;
}

Digest batch_digest(const Batch& batch) {
  auto bytes = encode_binary(batch);
  return Digest::of(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace herring::worker
