#include <doctest.h>

#include <set>

#include "irsa/rng.hpp"

using namespace irsa;

TEST_SUITE("rng") {
  TEST_CASE("philox known-answer vectors") {
    // Reference vectors of the Random123 distribution for 4x32-10.
    const Philox4x32 zero(0);
    CHECK(zero({0, 0, 0, 0}) == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const Philox4x32 ones(0xffffffffffffffffULL);
    CHECK(ones({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}) ==
          Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    const Philox4x32 pi(0x299f31d0a4093822ULL);
    CHECK(pi({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}) ==
          Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("substreams are disjoint and deterministic") {
    const Substream a(7, Stream::Direct), b(7, Stream::BsToTile), a2(7, Stream::Direct);
    CHECK(a.uniform(1, 2, 3) == a2.uniform(1, 2, 3));
    CHECK(a.uniform(1, 2, 3) != b.uniform(1, 2, 3));
    CHECK(a.uniform(1, 2, 3) != a.uniform(1, 2, 4));
  }

  TEST_CASE("uniforms lie strictly inside (0, 1)") {
    const Substream s(3, Stream::InitPhase);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double u = s.uniform(static_cast<std::uint32_t>(i));
      lo = std::min(lo, u);
      hi = std::max(hi, u);
      sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("complex normal has unit second moment and zero pseudo-variance") {
    const Substream s(11, Stream::TileToUser);
    const int n = 100000;
    double power = 0.0;
    std::complex<double> pseudo = 0.0, mean = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto z = s.complex_normal(static_cast<std::uint32_t>(i), 0, 0);
      power += std::norm(z);
      pseudo += z * z;
      mean += z;
    }
    CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(pseudo / double(n)) < 0.02);
    CHECK(std::abs(mean / double(n)) < 0.02);
  }

  TEST_CASE("mix_seed spreads nearby indices") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(mix_seed(1, r));
    CHECK(seen.size() == 1000);
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  }
}
