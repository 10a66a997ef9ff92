#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace maxnorm {

// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// FNV-1a, so stream tags can be given as readable strings.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) noexcept {
  return splitmix64(splitmix64(base) ^ splitmix64(tag + 0x632BE59BD9B4E019ull));
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) noexcept {
  return derive_seed(base, fnv1a(tag));
}

// Stream tags. Sampling and noise never share a generator.
inline constexpr std::string_view kSamplingStream = "sampling";
inline constexpr std::string_view kNoiseStream = "noise";
inline constexpr std::string_view kInitStream = "init";
inline constexpr std::string_view kShuffleStream = "shuffle";
inline constexpr std::string_view kTruthStream = "truth";

/// Seeded 64-bit generator (std::mt19937_64) with variate transforms written
/// out explicitly. The std:: distributions are implementation-defined, so
/// they are avoided to keep draws identical across toolchains and bindings.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view stream) : engine_(derive_seed(seed, stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller; caches the second variate.
  double normal();

  // Laplace with unit variance (scale 1/sqrt(2)), by inverse CDF.
  double laplace_unit();

  // +1 or -1 with equal probability.
  int sign() { return (engine_() >> 63) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace maxnorm
