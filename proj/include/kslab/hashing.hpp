#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace kslab {

// FNV-1a, 64-bit. Used for grid identity tokens and config hashes.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t seed = 1469598103934665603ull) {
  return fnv1a64(s.data(), s.size(), seed);
}

template <class T>
std::uint64_t fnv1a64_mix(const T& v, std::uint64_t seed) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  return fnv1a64(buf, sizeof(T), seed);
}

}  // namespace kslab
