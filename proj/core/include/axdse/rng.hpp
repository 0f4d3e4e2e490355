#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace axdse {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives a stable seed for an independent RNG stream.
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

// Bounded draw. The modulo bias is irrelevant at our scales; avoiding
// std::uniform_int_distribution keeps sequences identical across standard
// libraries, which the byte-identical-report requirement depends on.
inline std::size_t draw_below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// Uniform double in [0, 1).
inline double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates with the deterministic bounded draw above.
template <typename T>
void shuffle_det(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[draw_below(rng, i)]);
  }
}

}  // namespace axdse
