#pragma once

#include <cstdint>
#include <random>

namespace slicing {

/// SplitMix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of child stream `index` under `parent`. Children of one parent are
/// pairwise distinct streams, and the mapping depends only on the two keys,
/// so work split across any number of threads draws identical numbers.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(parent ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Seeded random generator. Every random draw in the library goes through one
/// of these, created from a master seed via `substream`.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Independent child generator keyed by `index`.
  Rng substream(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace slicing
