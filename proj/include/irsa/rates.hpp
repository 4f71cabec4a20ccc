#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "irsa/channel.hpp"
#include "irsa/scenario.hpp"
#include "irsa/types.hpp"

namespace irsa {

// Amplitude gains: beta_r(i, k) = |h_r[i][k]^H Theta_i G_i w_k|, beta_d[k] = |h_d[k]^H w_k|.
// Filled for every (tile, user) pair, associated or not.
struct LinkGains {
  Eigen::MatrixXd beta_r;  // I x K
  Eigen::VectorXd beta_d;  // K
};

struct RateReport {
  std::vector<double> r, r_upper, r_intf;  // bits/s per user
  double sum_rate = 0.0, sum_upper = 0.0, sum_intf = 0.0;
};

LinkGains link_gains(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta,
                     const BeamformingSet& W);

// Gains each pair would reach if the tile were phase-aligned to that user:
// beta_r(i, k) = sum_n |h_r[i][k]_n| |(G_i w_k)_n|, the maximum over Theta_i.
LinkGains aligned_gains(const ChannelSet& ch, const BeamformingSet& W);

double rate_from_snr(double snr, double bandwidth_hz);

double user_rate(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta, const CVector& w_k,
                 double noise_watts, double bandwidth_hz, std::size_t k);

// Triangle-inequality bound: amplitudes of direct and associated reflected paths add.
double upper_bound_rate(const LinkGains& g, const AssociationMatrix& A, double noise_watts, double bandwidth_hz,
                        std::size_t k);

// Reflections from tiles not associated to k count as interference.
double interference_rate(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta,
                         const CVector& w_k, double noise_watts, double bandwidth_hz, std::size_t k);

RateReport rate_report(const ChannelSet& ch, const AssociationMatrix& A, const BeamformingSet& W,
                       const ReflectionSet& theta, const ValidatedScenario& scn);

void write_rate_header(std::ostream& out);
void write_rate_rows(std::ostream& out, std::size_t realization, const std::string& case_name, const RateReport& rep);

}  // namespace irsa
