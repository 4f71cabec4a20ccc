#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "irsa/channel.hpp"
#include "irsa/scenario.hpp"

namespace irsa::testing {

inline ValidatedScenario scenario(std::size_t K, std::size_t I, double pt_dbm = 40.0) {
  ScenarioConfig cfg = with_users_and_tiles(ScenarioConfig{}, K, I);
  cfg.Pt_dbm = pt_dbm;
  return validate_config(cfg);
}

// Small scenario with few antennas and units, for fast property tests.
inline ValidatedScenario small_scenario(std::size_t K, std::size_t I, std::size_t M = 2, double units_side = 4) {
  ScenarioConfig cfg = with_users_and_tiles(ScenarioConfig{}, K, I);
  cfg.M = M;
  cfg.dx = cfg.Lx / units_side;
  cfg.dy = cfg.Ly / units_side;
  return validate_config(cfg);
}

// Hand-built channel set with every coefficient given by `fill`.
template <typename Fill>
ChannelSet channels(std::size_t K, std::size_t M, std::size_t I, std::size_t N, Fill fill) {
  ChannelSet ch;
  ch.K = K, ch.M = M, ch.I = I, ch.N = N;
  ch.h_d.assign(K, CVector(static_cast<Eigen::Index>(M)));
  ch.G.assign(I, CMatrix(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(M)));
  ch.h_r.assign(I, std::vector<CVector>(K, CVector(static_cast<Eigen::Index>(N))));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t m = 0; m < M; ++m) ch.h_d[k][m] = fill(0, k, 0, m);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < M; ++m) ch.G[i](n, m) = fill(1, i, n, m);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t n = 0; n < N; ++n) ch.h_r[i][k][n] = fill(2, i, k, n);
  return ch;
}

// Unit-variance complex Gaussian entries from a std::mt19937_64 (independent of the library RNG).
inline ChannelSet random_channels(std::size_t K, std::size_t M, std::size_t I, std::size_t N, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  return channels(K, M, I, N, [&](int, std::size_t, std::size_t, std::size_t) { return cd(nd(gen), nd(gen)); });
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace irsa::testing
