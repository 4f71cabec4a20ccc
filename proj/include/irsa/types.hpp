#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace irsa {

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Binary I x K tile-to-user association. Row i is tile i, column k is user k.
class AssociationMatrix {
 public:
  AssociationMatrix() = default;
  AssociationMatrix(std::size_t tiles, std::size_t users) : tiles_(tiles), users_(users), a_(tiles * users, 0) {}

  static AssociationMatrix from_owner(const std::vector<std::size_t>& owner, std::size_t users) {
    AssociationMatrix m(owner.size(), users);
    for (std::size_t i = 0; i < owner.size(); ++i) m.set(i, owner[i], true);
    return m;
  }

  std::size_t tiles() const { return tiles_; }
  std::size_t users() const { return users_; }

  bool operator()(std::size_t i, std::size_t k) const { return a_[i * users_ + k] != 0; }
  void set(std::size_t i, std::size_t k, bool v) { a_[i * users_ + k] = v ? 1 : 0; }

  std::size_t tile_load(std::size_t i) const {
    std::size_t s = 0;
    for (std::size_t k = 0; k < users_; ++k) s += a_[i * users_ + k];
    return s;
  }
  std::size_t user_load(std::size_t k) const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < tiles_; ++i) s += a_[i * users_ + k];
    return s;
  }

  // User that owns tile i, or users() when the tile is unassigned or shared.
  std::size_t owner(std::size_t i) const {
    std::size_t who = users_;
    for (std::size_t k = 0; k < users_; ++k) {
      if (!(*this)(i, k)) continue;
      if (who != users_) return users_;
      who = k;
    }
    return who;
  }

  bool each_tile_once() const {
    for (std::size_t i = 0; i < tiles_; ++i)
      if (tile_load(i) != 1) return false;
    return true;
  }

  bool meets_quotas(const std::vector<std::size_t>& quotas) const {
    if (quotas.size() != users_) return false;
    for (std::size_t k = 0; k < users_; ++k)
      if (user_load(k) != quotas[k]) return false;
    return true;
  }

  bool feasible(const std::vector<std::size_t>& quotas) const { return each_tile_once() && meets_quotas(quotas); }

  bool operator==(const AssociationMatrix&) const = default;

 private:
  std::size_t tiles_ = 0;
  std::size_t users_ = 0;
  std::vector<unsigned char> a_;
};

// Per-user BS beamformers w_k (length M each).
struct BeamformingSet {
  std::vector<CVector> w;
  // Set for users whose composite channel was exactly zero.
  std::vector<bool> zero_channel;
};

// Per-tile reflection phases theta[i][n] in [0, 2*pi), unit amplitude.
struct ReflectionSet {
  std::vector<Eigen::VectorXd> theta;

  CVector coefficients(std::size_t i) const {
    CVector out(theta[i].size());
    for (Eigen::Index n = 0; n < theta[i].size(); ++n) out[n] = std::polar(1.0, theta[i][n]);
    return out;
  }
};

}  // namespace irsa
