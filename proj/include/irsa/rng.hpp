#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace irsa {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Counter-based: every draw is a pure function of (key, counter), so each
// channel coefficient owns a fixed address that does not move when the
// scenario grows.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const {
    Key k = key_;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k[0] += kWeyl0;
        k[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  Key key_;
};

// Link roles and auxiliary draws. Each role is a disjoint substream.
enum class Stream : std::uint32_t {
  Direct = 1,
  BsToTile = 2,
  TileToUser = 3,
  InitPhase = 16,
  RandomAssociation = 17,
  RandomBeam = 18,
  RandomPhase = 19,
  Split = 20,
  WeightInit = 21,
  UserDrop = 22,
};

// A (seed, role) substream addressed by up to three indices plus a draw index.
class Substream {
 public:
  Substream(std::uint64_t seed, Stream role) : gen_(seed), role_(static_cast<std::uint32_t>(role)) {}

  // Two uniforms in (0, 1) with 53-bit resolution.
  std::array<double, 2> uniform2(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d = 0) const {
    // Role occupies the top byte of the first word; indices are below 2^24.
    const auto out = gen_({(role_ << 24) ^ a, b, c, d});
    return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
  }

  double uniform(std::uint32_t a, std::uint32_t b = 0, std::uint32_t c = 0, std::uint32_t d = 0) const {
    return uniform2(a, b, c, d)[0];
  }

  // Circularly-symmetric CN(0, 1) via Box-Muller.
  std::complex<double> complex_normal(std::uint32_t a, std::uint32_t b, std::uint32_t c,
                                      std::uint32_t d = 0) const {
    const auto [u1, u2] = uniform2(a, b, c, d);
    const double r = std::sqrt(-std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(bits & ((1ULL << 53) - 1)) + 0.5) * 0x1.0p-53;
  }

  Philox4x32 gen_;
  std::uint32_t role_;
};

// SplitMix64 finalizer; derives per-realization seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace irsa
