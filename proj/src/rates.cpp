#include "irsa/rates.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>

#include "irsa/error.hpp"

namespace irsa {

namespace {

void check_beams(const ChannelSet& ch, const BeamformingSet& W) {
  if (W.w.size() != ch.K) throw DimensionMismatch("beamforming set has wrong user count");
  for (const auto& w : W.w)
    if (static_cast<std::size_t>(w.size()) != ch.M) throw DimensionMismatch("beamformer has wrong antenna count");
}

// (sum_i a[i][k] h_r^H Theta_i G_i + h_d^H) w
cd received_amplitude(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta, const CVector& w,
                      std::size_t k, bool associated) {
  cd acc = associated ? ch.h_d[k].dot(w) : cd(0.0);
  for (std::size_t i = 0; i < ch.I; ++i)
    if (A(i, k) == associated) acc += reflected_term(ch, theta, i, k, w);
  return acc;
}

void check_user(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta, const CVector& w,
                std::size_t k) {
  if (k >= ch.K) throw DimensionMismatch("user index out of range");
  if (static_cast<std::size_t>(w.size()) != ch.M) throw DimensionMismatch("beamformer has wrong antenna count");
  check_dimensions(ch, A, theta);
}

}  // namespace

LinkGains link_gains(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta,
                     const BeamformingSet& W) {
  check_dimensions(ch, A, theta);
  check_beams(ch, W);
  LinkGains g;
  g.beta_r.resize(ch.I, ch.K);
  g.beta_d.resize(ch.K);
  for (std::size_t k = 0; k < ch.K; ++k) {
    g.beta_d[k] = std::abs(ch.h_d[k].dot(W.w[k]));
    for (std::size_t i = 0; i < ch.I; ++i) g.beta_r(i, k) = std::abs(reflected_term(ch, theta, i, k, W.w[k]));
  }
  return g;
}

LinkGains aligned_gains(const ChannelSet& ch, const BeamformingSet& W) {
  check_beams(ch, W);
  LinkGains g;
  g.beta_r.resize(ch.I, ch.K);
  g.beta_d.resize(ch.K);
  for (std::size_t k = 0; k < ch.K; ++k) {
    g.beta_d[k] = std::abs(ch.h_d[k].dot(W.w[k]));
    for (std::size_t i = 0; i < ch.I; ++i)
      g.beta_r(i, k) = (ch.h_r[i][k].cwiseAbs().array() * (ch.G[i] * W.w[k]).cwiseAbs().array()).sum();
  }
  return g;
}

double rate_from_snr(double snr, double bandwidth_hz) { return bandwidth_hz * std::log1p(snr) / std::numbers::ln2; }

double user_rate(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta, const CVector& w_k,
                 double noise_watts, double bandwidth_hz, std::size_t k) {
  if (!(noise_watts > 0.0)) throw InvalidParameter("noise", "must be positive");
  check_user(ch, A, theta, w_k, k);
  return rate_from_snr(std::norm(received_amplitude(ch, A, theta, w_k, k, true)) / noise_watts, bandwidth_hz);
}

double upper_bound_rate(const LinkGains& g, const AssociationMatrix& A, double noise_watts, double bandwidth_hz,
                        std::size_t k) {
  if (!(noise_watts > 0.0)) throw InvalidParameter("noise", "must be positive");
  if (A.tiles() != static_cast<std::size_t>(g.beta_r.rows()) || A.users() != static_cast<std::size_t>(g.beta_r.cols()))
    throw DimensionMismatch("association does not match gain table");
  if (k >= A.users()) throw DimensionMismatch("user index out of range");
  double amp = g.beta_d[k];
  for (std::size_t i = 0; i < A.tiles(); ++i)
    if (A(i, k)) amp += g.beta_r(i, k);
  return rate_from_snr(amp * amp / noise_watts, bandwidth_hz);
}

double interference_rate(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta,
                         const CVector& w_k, double noise_watts, double bandwidth_hz, std::size_t k) {
  if (!(noise_watts > 0.0)) throw InvalidParameter("noise", "must be positive");
  check_user(ch, A, theta, w_k, k);
  const double signal = std::norm(received_amplitude(ch, A, theta, w_k, k, true));
  const double leak = std::norm(received_amplitude(ch, A, theta, w_k, k, false));
  return rate_from_snr(signal / (noise_watts + leak), bandwidth_hz);
}

RateReport rate_report(const ChannelSet& ch, const AssociationMatrix& A, const BeamformingSet& W,
                       const ReflectionSet& theta, const ValidatedScenario& scn) {
  check_beams(ch, W);
  const LinkGains g = link_gains(ch, A, theta, W);
  RateReport rep;
  for (std::size_t k = 0; k < ch.K; ++k) {
    rep.r.push_back(user_rate(ch, A, theta, W.w[k], scn.noise_watts, scn.bandwidth_hz, k));
    rep.r_upper.push_back(upper_bound_rate(g, A, scn.noise_watts, scn.bandwidth_hz, k));
    rep.r_intf.push_back(interference_rate(ch, A, theta, W.w[k], scn.noise_watts, scn.bandwidth_hz, k));
    rep.sum_rate += rep.r.back();
    rep.sum_upper += rep.r_upper.back();
    rep.sum_intf += rep.r_intf.back();
  }
  return rep;
}

void write_rate_header(std::ostream& out) { out << "realization,case,k,r,r_upper,r_intf\n"; }

void write_rate_rows(std::ostream& out, std::size_t realization, const std::string& case_name, const RateReport& rep) {
  const auto old = out.precision(17);
  for (std::size_t k = 0; k < rep.r.size(); ++k)
    out << realization << ',' << case_name << ',' << k + 1 << ',' << rep.r[k] << ',' << rep.r_upper[k] << ','
        << rep.r_intf[k] << '\n';
  out.precision(old);
}

}  // namespace irsa
