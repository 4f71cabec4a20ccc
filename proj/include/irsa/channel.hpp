#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsa/scenario.hpp"
#include "irsa/types.hpp"

namespace irsa {

// One fading realization.
//   h_d[k]    : BS -> user k, length M
//   G[i]      : BS -> tile i, N x M (row n is h^t_{i,n})
//   h_r[i][k] : tile i -> user k, length N
struct ChannelSet {
  std::size_t K = 0, M = 0, I = 0, N = 0;
  std::uint64_t seed = 0;
  std::vector<CVector> h_d;
  std::vector<CMatrix> G;
  std::vector<std::vector<CVector>> h_r;

  bool operator==(const ChannelSet& o) const;
};

// Free-space power gain (lambda / (4 pi d))^2.
double path_loss(double wavelength, double d);

ChannelSet draw_channels(const ValidatedScenario& scn, std::uint64_t seed);

// sum_i a[i][k] G_i^H Theta_i^H h_r[i][k] + h_d[k]; the MRT direction for user k.
CVector composite_channel(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta, std::size_t k);

// h_r[i][k]^H Theta_i G_i w, the scalar received through tile i.
cd reflected_term(const ChannelSet& ch, const ReflectionSet& theta, std::size_t i, std::size_t k, const CVector& w);

void check_dimensions(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta);

// Lossless binary dump: header (magic, K, M, I, N, seed) then raw doubles.
void save_channels(const ChannelSet& ch, const std::string& path);
ChannelSet load_channels(const std::string& path);

}  // namespace irsa
