#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace herring {

using ReplicaId = std::uint32_t;
using Round = std::uint64_t;
using SubdagId = std::uint64_t;
using Loi = std::uint64_t;
using SimTime = std::int64_t;  // milliseconds of simulated time

inline constexpr ReplicaId kNoReplica = static_cast<ReplicaId>(-1);

/// 32-byte SHA-256 digest. Ordering is lexicographic over the bytes, which is
/// the canonical tie-break order used throughout the fairness layer.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  auto operator<=>(const Digest&) const = default;
  bool operator==(const Digest&) const = default;

  std::string hex() const;
  static Digest from_hex(std::string_view hex);
  /// SHA-256 of arbitrary bytes.
  static Digest of(std::string_view data);
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    std::uint64_t h;
    std::memcpy(&h, d.bytes.data(), sizeof(h));
    return static_cast<std::size_t>(h);
  }
};

/// Unordered transaction pair, stored canonically with first < second.
struct TxPair {
  Digest first;
  Digest second;

  static TxPair make(const Digest& a, const Digest& b) {
    return a < b ? TxPair{a, b} : TxPair{b, a};
  }
  auto operator<=>(const TxPair&) const = default;
  bool operator==(const TxPair&) const = default;
};

struct TxPairHash {
  std::size_t operator()(const TxPair& p) const noexcept {
    DigestHash h;
    return h(p.first) * 1000003u ^ h(p.second);
  }
};

/// Directed resolution of a pair: from precedes to.
struct DirectedEdge {
  Digest from;
  Digest to;
  auto operator<=>(const DirectedEdge&) const = default;
  bool operator==(const DirectedEdge&) const = default;
};

/// Raised when a configuration or input document is malformed. `key` names the
/// offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Raised when a protocol contract is violated by the caller (out-of-order
/// subdag, duplicate FairPropose, double application).
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Fault and fairness thresholds derived from (n, f, gamma).
struct Thresholds {
  std::uint32_t n = 0;
  std::uint32_t f = 0;
  double gamma = 1.0;
  std::uint32_t quorum = 0;       // (k-1)f + 1 round/reference quorum
  std::uint32_t tau = 0;          // shaded / edge threshold n(1-gamma)+f+1
  std::uint32_t tau_solid = 0;    // n - 2f
  std::uint32_t vote_quorum = 0;  // n - f distinct FairUpdate authors

  /// Validates 1/2 < gamma <= 1 and n > 4f/(2gamma-1); throws ConfigError.
  static Thresholds make(std::uint32_t n, std::uint32_t f, double gamma);
};

/// Smallest integer >= x, tolerant of floating-point noise in fractional
/// thresholds such as 3 * (1 - 2/3).
std::uint32_t ceil_count(double x);

/// (k-1)f + 1 with k = ceil(4 / (2gamma - 1)).
std::uint32_t quorum_size(std::uint32_t n, std::uint32_t f, double gamma);

/// splitmix64 finalizer; used to derive independent deterministic streams.
std::uint64_t mix64(std::uint64_t x);

}  // namespace herring

template <>
struct std::hash<herring::Digest> : herring::DigestHash {};
template <>
struct std::hash<herring::TxPair> : herring::TxPairHash {};
