#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace styledrift::internal {

// FNV-1a 64-bit; stable across platforms, used for cache keys and
// reproducibility fingerprints (not for security).
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string to_hex16(std::uint64_t value) {
  static const char* kDigits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
    value >>= 4;
  }
  return out;
}

inline std::string fnv1a64_hex(std::string_view data) {
  return to_hex16(fnv1a64(data));
}

}  // namespace styledrift::internal
