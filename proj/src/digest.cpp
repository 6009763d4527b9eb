#include "herring/common.hpp"

#include <openssl/sha.h>

#include <cmath>

namespace herring {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::string Digest::hex() const {
  std::string out(64, '0');
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    out[2 * i] = kHexDigits[bytes[i] >> 4];
    out[2 * i + 1] = kHexDigits[bytes[i] & 0xF];
  }
  return out;
}

Digest Digest::from_hex(std::string_view hex) {
  if (hex.size() != 64) throw ConfigError("digest", "expected 64 hex characters");
  Digest d;
  for (std::size_t i = 0; i < 32; ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw ConfigError("digest", "invalid hex character");
    d.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return d;
}

Digest Digest::of(std::string_view data) {
  Digest d;
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), d.bytes.data());
  return d;
}

std::uint32_t ceil_count(double x) {
  if (x <= 0) return 0;
  return static_cast<std::uint32_t>(std::ceil(x - 1e-9));
}

std::uint32_t quorum_size(std::uint32_t n, std::uint32_t f, double gamma) {
  if (!(gamma > 0.5 && gamma <= 1.0 + 1e-12))
    throw ConfigError("gamma", "must satisfy 1/2 < gamma <= 1");
  if (!(n * (2 * gamma - 1) - 4.0 * f > 1e-9))
    throw ConfigError("n", "must satisfy n > 4f / (2 gamma - 1)");
  std::uint32_t k = ceil_count(4.0 / (2 * gamma - 1));
  return (k - 1) * f + 1;
}

Thresholds Thresholds::make(std::uint32_t n, std::uint32_t f, double gamma) {
  Thresholds t;
  t.n = n;
  t.f = f;
  t.gamma = gamma;
  t.quorum = quorum_size(n, f, gamma);
  t.tau = ceil_count(n * (1 - gamma) + f + 1);
  t.tau_solid = n - 2 * f;
  t.vote_quorum = n - f;
  return t;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace herring
