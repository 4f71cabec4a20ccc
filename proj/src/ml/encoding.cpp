#include "irsa/ml/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "irsa/error.hpp"

namespace irsa::ml {

std::vector<std::uint32_t> encode_association(const AssociationMatrix& A) {
  if (A.users() > 31) throw InvalidParameter("K", "too many users for a 32-bit code");
  if (!A.each_tile_once()) throw InfeasibleQuota("association must give every tile exactly one user");
  std::vector<std::uint32_t> codes(A.tiles(), 0);
  for (std::size_t i = 0; i < A.tiles(); ++i)
    for (std::size_t k = 0; k < A.users(); ++k)
      if (A(i, k)) codes[i] |= 1u << k;
  return codes;
}

AssociationMatrix decode_codes(const std::vector<std::uint32_t>& codes, std::size_t users) {
  AssociationMatrix A(codes.size(), users);
  for (std::size_t i = 0; i < codes.size(); ++i)
    for (std::size_t k = 0; k < users; ++k)
      if (codes[i] & (1u << k)) A.set(i, k, true);
  return A;
}

std::size_t nearest_user(double value, std::size_t users) {
  std::size_t best = 0;
  double best_dist = std::abs(value - 1.0);
  for (std::size_t k = 1; k < users; ++k) {
    const double d = std::abs(value - std::ldexp(1.0, static_cast<int>(k)));
    if (d < best_dist) {
      best = k;
      best_dist = d;
    }
  }
  return best;
}

namespace {

// Greedy quota repair: (tile, user) pairs in order of decreasing confidence,
// each tile once, each user up to its quota. `dist(i, k)` is the distance of
// tile i's output to user k's value.
template <typename Dist>
AssociationMatrix repair_owners(const std::vector<std::size_t>& owner, const std::vector<std::size_t>& quotas,
                                Dist dist) {
  const std::size_t tiles = owner.size(), users = quotas.size();
  struct Pair {
    double dist;
    std::size_t i, k;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < tiles; ++i)
    for (std::size_t k = 0; k < users; ++k) pairs.push_back({dist(i, k), i, k});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.dist < b.dist; });
  std::vector<std::size_t> load(users, 0);
  std::vector<std::size_t> assigned(tiles, users);
  for (const auto& p : pairs) {
    if (assigned[p.i] != users || load[p.k] >= quotas[p.k]) continue;
    assigned[p.i] = p.k;
    ++load[p.k];
  }
  // Quotas summing below the tile count leave tiles over; they keep their rounded user.
  for (std::size_t i = 0; i < tiles; ++i)
    if (assigned[i] == users) assigned[i] = owner[i];
  return AssociationMatrix::from_owner(assigned, users);
}

}  // namespace

AssociationMatrix decode_output(const Eigen::Ref<const Eigen::VectorXd>& y, const std::vector<std::size_t>& quotas,
                                bool repair) {
  const std::size_t tiles = static_cast<std::size_t>(y.size());
  const std::size_t users = quotas.size();
  if (users == 0) throw InvalidParameter("K", "at least one user required");
  std::vector<std::size_t> owner(tiles);
  for (std::size_t i = 0; i < tiles; ++i) owner[i] = nearest_user(std::round(y[i]), users);
  AssociationMatrix A = AssociationMatrix::from_owner(owner, users);
  if (!repair || A.meets_quotas(quotas)) return A;
  return repair_owners(owner, quotas, [&](std::size_t i, std::size_t k) {
    return std::abs(y[static_cast<Eigen::Index>(i)] - std::ldexp(1.0, static_cast<int>(k)));
  });
}

std::size_t nearest_exponent(double e, std::size_t users) {
  const double k = std::ceil(e - 0.5);  // halves go down
  return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(users - 1)));
}

AssociationMatrix decode_exponents(const Eigen::Ref<const Eigen::VectorXd>& e, const std::vector<std::size_t>& quotas,
                                   bool repair) {
  const std::size_t tiles = static_cast<std::size_t>(e.size());
  const std::size_t users = quotas.size();
  if (users == 0) throw InvalidParameter("K", "at least one user required");
  std::vector<std::size_t> owner(tiles);
  for (std::size_t i = 0; i < tiles; ++i) owner[i] = nearest_exponent(e[static_cast<Eigen::Index>(i)], users);
  AssociationMatrix A = AssociationMatrix::from_owner(owner, users);
  if (!repair || A.meets_quotas(quotas)) return A;
  return repair_owners(owner, quotas, [&](std::size_t i, std::size_t k) {
    return std::abs(e[static_cast<Eigen::Index>(i)] - static_cast<double>(k));
  });
}

}  // namespace irsa::ml
