#include "irsa/association.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "irsa/error.hpp"

namespace irsa {

double curvature_scalar(double amplitude_sum, double noise_watts, double bandwidth_hz) {
  return std::numbers::ln2 / (2.0 * bandwidth_hz) * (noise_watts + amplitude_sum * amplitude_sum) / amplitude_sum;
}

std::vector<std::size_t> top_tiles(const LinkGains& g, const Eigen::VectorXd& lambda, double c, std::size_t quota,
                                   std::size_t k) {
  const auto tiles = static_cast<std::size_t>(g.beta_r.rows());
  if (quota > tiles) throw InfeasibleQuota("quota exceeds tile count");
  std::vector<std::size_t> order(tiles);
  std::iota(order.begin(), order.end(), 0);
  auto score = [&](std::size_t i) { return g.beta_r(i, k) / c + lambda[i]; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score(a) > score(b); });
  order.resize(quota);
  return order;
}

namespace {

double smallest_positive_gain(const LinkGains& g, std::size_t k) {
  double best = g.beta_d[k] > 0.0 ? g.beta_d[k] : INFINITY;
  for (Eigen::Index i = 0; i < g.beta_r.rows(); ++i)
    if (g.beta_r(i, k) > 0.0) best = std::min(best, g.beta_r(i, k));
  return best;
}

double amplitude_sum(const LinkGains& g, const std::vector<std::size_t>& tiles, std::size_t k) {
  double x = g.beta_d[k];
  for (auto i : tiles) x += g.beta_r(i, k);
  return x;
}

}  // namespace

FixedPointResult fixed_point_c(const LinkGains& g, const Eigen::VectorXd& lambda, std::size_t quota,
                               double noise_watts, double bandwidth_hz, std::size_t k, double eps, int max_iter,
                               double damping, double c0) {
  if (!(eps > 0.0)) throw InvalidParameter("eps_fixedpoint", "must be positive");
  if (k >= static_cast<std::size_t>(g.beta_r.cols())) throw DimensionMismatch("user index out of range");
  const double floor_gain = smallest_positive_gain(g, k);
  if (!std::isfinite(floor_gain)) throw NumericalFailure("user " + std::to_string(k) + " has no positive gain");

  // A selection whose amplitudes are all zero would send c to infinity; the
  // smallest positive gain stands in for it.
  auto F = [&](double c) {
    const double x = amplitude_sum(g, top_tiles(g, lambda, c, quota, k), k);
    return curvature_scalar(x > 0.0 ? x : floor_gain, noise_watts, bandwidth_hz);
  };

  FixedPointResult res;
  res.c = c0 > 0.0 ? c0 : curvature_scalar(g.beta_d[k] > 0.0 ? g.beta_d[k] : floor_gain, noise_watts, bandwidth_hz);
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    const double f = F(res.c);
    if (std::abs(res.c - f) < eps * std::abs(res.c)) {
      res.converged = true;
      return res;
    }
    res.c = (1.0 - damping) * res.c + damping * f;
  }
  res.converged = std::abs(res.c - F(res.c)) < eps * std::abs(res.c);
  return res;
}

AssociationMatrix select_unconstrained(const LinkGains& g, const std::vector<double>& c, const Eigen::VectorXd& lambda,
                                       const std::vector<std::size_t>& quotas) {
  const auto tiles = static_cast<std::size_t>(g.beta_r.rows());
  const auto users = static_cast<std::size_t>(g.beta_r.cols());
  if (quotas.size() != users || c.size() != users || static_cast<std::size_t>(lambda.size()) != tiles)
    throw DimensionMismatch("selection inputs disagree on tile or user count");
  AssociationMatrix raw(tiles, users);
  for (std::size_t k = 0; k < users; ++k) {
    if (!(c[k] > 0.0)) throw InvalidParameter("c", "must be positive");
    for (auto i : top_tiles(g, lambda, c[k], quotas[k], k)) raw.set(i, k, true);
  }
  return raw;
}

AssociationMatrix repair_association(const LinkGains& g, const std::vector<double>& c, const Eigen::VectorXd& lambda,
                                     const AssociationMatrix& raw, const std::vector<std::size_t>& quotas) {
  if (raw.feasible(quotas)) return raw;
  const auto tiles = raw.tiles();
  const auto users = raw.users();
  if (std::accumulate(quotas.begin(), quotas.end(), std::size_t{0}) != tiles)
    throw InfeasibleQuota("quotas do not sum to the tile count");

  struct Pair {
    double score;
    std::size_t i, k;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < tiles; ++i)
    for (std::size_t k = 0; k < users; ++k) pairs.push_back({g.beta_r(i, k) / c[k] + lambda[i], i, k});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.score > b.score; });

  AssociationMatrix A(tiles, users);
  std::vector<bool> taken(tiles, false);
  std::vector<std::size_t> load(users, 0);
  for (const auto& p : pairs) {
    if (taken[p.i] || load[p.k] >= quotas[p.k]) continue;
    A.set(p.i, p.k, true);
    taken[p.i] = true;
    ++load[p.k];
  }
  // Users still short take their best remaining tiles.
  for (std::size_t k = 0; k < users; ++k) {
    while (load[k] < quotas[k]) {
      std::size_t best = tiles;
      for (std::size_t i = 0; i < tiles; ++i)
        if (!taken[i] && (best == tiles || g.beta_r(i, k) / c[k] + lambda[i] > g.beta_r(best, k) / c[k] + lambda[best]))
          best = i;
      if (best == tiles) throw InfeasibleQuota("no free tile left for user " + std::to_string(k + 1));
      A.set(best, k, true);
      taken[best] = true;
      ++load[k];
    }
  }
  return A;
}

AssociationMatrix select_association(const LinkGains& g, const std::vector<double>& c, const Eigen::VectorXd& lambda,
                                     const std::vector<std::size_t>& quotas) {
  return repair_association(g, c, lambda, select_unconstrained(g, c, lambda, quotas), quotas);
}

Eigen::VectorXd dual_update(const Eigen::VectorXd& lambda, const AssociationMatrix& raw, int t, double step_a) {
  if (!(step_a > 0.0)) throw InvalidParameter("dual_step_a", "must be positive");
  if (static_cast<std::size_t>(lambda.size()) != raw.tiles()) throw DimensionMismatch("lambda has wrong length");
  Eigen::VectorXd out = lambda;
  const double step = step_a / (1.0 + t);
  for (std::size_t i = 0; i < raw.tiles(); ++i)
    out[i] -= step * (static_cast<double>(raw.tile_load(i)) - 1.0);
  return out;
}

AssociationResult solve_association(const LinkGains& g, const ValidatedScenario& scn,
                                    const std::optional<AssociationMatrix>& previous) {
  const std::size_t tiles = scn.I, users = scn.K;
  if (static_cast<std::size_t>(g.beta_r.rows()) != tiles || static_cast<std::size_t>(g.beta_r.cols()) != users ||
      static_cast<std::size_t>(g.beta_d.size()) != users)
    throw DimensionMismatch("gain table does not match scenario");
  if (std::accumulate(scn.quotas.begin(), scn.quotas.end(), std::size_t{0}) != tiles)
    throw InfeasibleQuota("quotas do not sum to the tile count");

  // Normalize: mean gain 1, unit bandwidth. Scores and c scale together, so
  // the selection is unchanged; only lambda's units are fixed by this.
  double mean = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < g.beta_r.size(); ++i) mean += g.beta_r.data()[i], ++count;
  for (Eigen::Index k = 0; k < g.beta_d.size(); ++k) mean += g.beta_d[k], ++count;
  mean /= static_cast<double>(count);
  if (!(mean > 0.0)) throw NumericalFailure("all link gains are zero");
  const LinkGains norm{g.beta_r / mean, g.beta_d / mean};
  const double noise = scn.noise_watts / (mean * mean);
  const auto& tol = scn.tol;

  AssociationResult res;
  res.dual.lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tiles));
  res.dual.c.assign(users, 0.0);
  const AssociationMatrix seed_A = previous && previous->tiles() == tiles && previous->users() == users
                                       ? *previous
                                       : AssociationMatrix(tiles, users);
  for (std::size_t k = 0; k < users; ++k) {
    double x = norm.beta_d[k];
    for (std::size_t i = 0; i < tiles; ++i)
      if (seed_A(i, k)) x += norm.beta_r(i, k);
    res.dual.c[k] = x > 0.0 ? curvature_scalar(x, noise, 1.0) : 0.0;
  }

  int stable = 0;
  for (int t = 0; t < tol.max_iters_dual; ++t) {
    for (std::size_t k = 0; k < users; ++k)
      res.dual.c[k] = fixed_point_c(norm, res.dual.lambda, scn.quotas[k], noise, 1.0, k, tol.eps_fixedpoint,
                                    tol.max_iters_fixedpoint, tol.fixedpoint_damping, res.dual.c[k])
                          .c;
    const AssociationMatrix raw = select_unconstrained(norm, res.dual.c, res.dual.lambda, scn.quotas);
    AssociationMatrix A = repair_association(norm, res.dual.c, res.dual.lambda, raw, scn.quotas);
    res.dual.iterations = t + 1;
    stable = (t > 0 && A == res.A) ? stable + 1 : 0;
    res.A = std::move(A);
    if (stable >= tol.dual_stable_iters) {
      res.dual.converged = true;
      break;
    }
    res.dual.lambda = dual_update(res.dual.lambda, raw, t, tol.dual_step_a);
  }
  return res;
}

}  // namespace irsa
