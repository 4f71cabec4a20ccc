#pragma once

#include <optional>
#include <vector>

#include "irsa/rates.hpp"
#include "irsa/scenario.hpp"
#include "irsa/types.hpp"

namespace irsa {

// Dual prices lambda_i and per-user curvature scalars c_k. Both are kept in
// normalized units: gains divided by their mean and unit bandwidth, which
// makes the default step size independent of transmit power.
struct DualState {
  Eigen::VectorXd lambda;
  std::vector<double> c;
  int iterations = 0;
  bool converged = false;
};

struct FixedPointResult {
  double c = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct AssociationResult {
  AssociationMatrix A;
  DualState dual;
};

// Right-hand side of the c_k equation for a fixed amplitude sum
// x = sum_i a_ik beta_ik + beta_d_k:  ln2 / (2B) * (sigma^2 + x^2) / x.
double curvature_scalar(double amplitude_sum, double noise_watts, double bandwidth_hz);

// The `quota` tiles with the largest beta_r(i, k) / c + lambda_i; ties go to the lower index.
std::vector<std::size_t> top_tiles(const LinkGains& g, const Eigen::VectorXd& lambda, double c, std::size_t quota,
                                   std::size_t k);

// Damped fixed-point iteration c <- (1 - damping) c + damping F(c), where F
// re-selects the top tiles for the current c. Stops when |c - F(c)| < eps |c|.
// `c0` <= 0 starts from F evaluated on the direct gain alone.
FixedPointResult fixed_point_c(const LinkGains& g, const Eigen::VectorXd& lambda, std::size_t quota,
                               double noise_watts, double bandwidth_hz, std::size_t k, double eps, int max_iter,
                               double damping = 0.5, double c0 = 0.0);

// Per-user top-N_k selection with no cross-user coupling; may assign a tile twice.
AssociationMatrix select_unconstrained(const LinkGains& g, const std::vector<double>& c, const Eigen::VectorXd& lambda,
                                       const std::vector<std::size_t>& quotas);

// Greedy repair of a per-user selection into a matrix meeting both tile and quota constraints.
AssociationMatrix repair_association(const LinkGains& g, const std::vector<double>& c, const Eigen::VectorXd& lambda,
                                     const AssociationMatrix& raw, const std::vector<std::size_t>& quotas);

AssociationMatrix select_association(const LinkGains& g, const std::vector<double>& c, const Eigen::VectorXd& lambda,
                                     const std::vector<std::size_t>& quotas);

// Subgradient step on the dual: lambda_i -= step_a / (1 + t) * (sum_k a_ik - 1).
Eigen::VectorXd dual_update(const Eigen::VectorXd& lambda, const AssociationMatrix& raw, int t, double step_a);

// Dual-decomposition association for fixed W and Theta. `previous`, when given,
// seeds the c_k initialization.
AssociationResult solve_association(const LinkGains& g, const ValidatedScenario& scn,
                                    const std::optional<AssociationMatrix>& previous = std::nullopt);

}  // namespace irsa
