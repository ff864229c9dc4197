#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace socinstruct {

// SplitMix64 finalizer; used to turn (seed, stream) pairs into engine seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view data);

// Deterministic generator whose draws do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Uniform double in [0, 1).
  double unit();

 private:
  std::mt19937_64 engine_;
};

}  // namespace socinstruct
