#pragma once

#include <cstdint>
#include <random>

namespace signbench {

// splitmix64: cheap, well-mixed 64-bit finalizer used to derive stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derive an independent generator for (seed, stream). Stream indices are used
// for parallel workers/voters so that a fixed reduction order gives
// bit-reproducible results regardless of scheduling.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(stream + 0x51a7b9e5ULL));
  return std::mt19937_64(s);
}

}  // namespace signbench
