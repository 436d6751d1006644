#pragma once

#include <cstdint>

namespace uncmap {

// SplitMix64. Used instead of <random> engines+distributions because the
// standard distributions are implementation-defined, and fitted models must
// be bit-identical across standard libraries.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n). Multiply-shift reduction; bias is below 2^-40 for
  // any n this library sees.
  std::uint64_t index(std::uint64_t n) noexcept {
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(next()) * n) >> 64);
  }

private:
  std::uint64_t state_;
};

// i-th element of the SplitMix64 stream started at `seed`. Tree and
// per-class seeds come from here so that member i never depends on how many
// members are requested.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i) noexcept {
  SplitMix64 g(seed + 0x9E3779B97F4A7C15ULL * i);
  return g.next();
}

}  // namespace uncmap
