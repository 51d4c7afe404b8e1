#pragma once

#include <cstdint>
#include <string_view>

namespace fsrl {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Named seed substream. All randomness in a run flows from one root seed
// through derive_seed(root, "agent"), derive_seed(root, "folds"),
// derive_seed(root, "svm"), derive_seed(root, "generator").
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) {
  return splitmix64(splitmix64(root) ^ fnv1a64(stream));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t salt) {
  return splitmix64(splitmix64(root) ^ splitmix64(salt ^ 0x517cc1b727220a95ULL));
}

}  // namespace fsrl
