#pragma once

// FNV-1a 64-bit digest of the canonical configuration string, rendered as
// 16 lowercase hex digits. Embedded in every output for provenance: a rerun
// with the same digest and seed must reproduce the output bytes.

#include <cstdint>
#include <string>

namespace watecli {

inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

inline std::string config_digest(const std::string& canonical) {
  return hex64(fnv1a64(canonical));
}

}  // namespace watecli
