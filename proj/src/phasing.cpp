#include "irsa/phasing.hpp"

#include <cmath>
#include <numbers>

#include "irsa/error.hpp"
#include "irsa/rng.hpp"

namespace irsa {

double wrap_phase(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(angle, two_pi);
  if (t < 0.0) t += two_pi;
  if (t >= two_pi) t = 0.0;
  return t;
}

BeamformingSet mrt_beamform(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta,
                            double pt_watts) {
  if (!(pt_watts > 0.0)) throw InvalidParameter("Pt", "must be positive");
  BeamformingSet W;
  W.w.reserve(ch.K);
  W.zero_channel.assign(ch.K, false);
  const double amp = std::sqrt(pt_watts);
  for (std::size_t k = 0; k < ch.K; ++k) {
    CVector v = composite_channel(ch, A, theta, k);
    const double norm = v.norm();
    if (norm == 0.0) {
      W.w.push_back(CVector::Zero(static_cast<Eigen::Index>(ch.M)));
      W.zero_channel[k] = true;
    } else {
      W.w.push_back(v * (amp / norm));
    }
  }
  return W;
}

BeamformingSet direct_mrt(const ChannelSet& ch, double pt_watts) {
  const AssociationMatrix none(ch.I, ch.K);
  ReflectionSet flat;
  flat.theta.assign(ch.I, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ch.N)));
  return mrt_beamform(ch, none, flat, pt_watts);
}

double direct_phase(const ChannelSet& ch, const CVector& w_k, std::size_t k) {
  const cd d = ch.h_d[k].dot(w_k);
  return d == cd(0.0) ? 0.0 : std::arg(d);
}

namespace {

void align_tile(const ChannelSet& ch, const CVector& w, std::size_t i, std::size_t k, double psi,
                Eigen::VectorXd& out) {
  const CVector gw = ch.G[i] * w;
  out.resize(static_cast<Eigen::Index>(ch.N));
  for (std::size_t n = 0; n < ch.N; ++n) {
    const double phi = std::arg(std::conj(ch.h_r[i][k][n]) * gw[n]);
    out[n] = wrap_phase(psi - phi);
  }
}

ReflectionSet phases_impl(const ChannelSet& ch, const AssociationMatrix& A, const BeamformingSet& W,
                          const ReflectionSet* previous) {
  if (A.tiles() != ch.I || A.users() != ch.K) throw DimensionMismatch("association does not match channels");
  if (W.w.size() != ch.K) throw DimensionMismatch("beamforming set has wrong user count");
  if (previous && previous->theta.size() != ch.I) throw DimensionMismatch("previous phases have wrong tile count");
  ReflectionSet out;
  out.theta.resize(ch.I);
  for (std::size_t i = 0; i < ch.I; ++i) {
    const auto load = A.tile_load(i);
    if (load > 1) throw InvalidParameter("association", "tile " + std::to_string(i + 1) + " is shared by several users");
    if (load == 0) {
      if (!previous) throw InvalidParameter("association", "tile " + std::to_string(i + 1) + " is not associated");
      out.theta[i] = previous->theta[i];
      continue;
    }
    const std::size_t k = A.owner(i);
    align_tile(ch, W.w[k], i, k, direct_phase(ch, W.w[k], k), out.theta[i]);
  }
  return out;
}

}  // namespace

ReflectionSet optimal_phases(const ChannelSet& ch, const AssociationMatrix& A, const BeamformingSet& W) {
  return phases_impl(ch, A, W, nullptr);
}

ReflectionSet optimal_phases(const ChannelSet& ch, const AssociationMatrix& A, const BeamformingSet& W,
                             const ReflectionSet& previous) {
  return phases_impl(ch, A, W, &previous);
}

ReflectionSet random_phases(std::size_t tiles, std::size_t units, std::uint64_t seed, Stream role) {
  const Substream s(seed, role);
  ReflectionSet out;
  out.theta.resize(tiles);
  for (std::size_t i = 0; i < tiles; ++i) {
    out.theta[i].resize(static_cast<Eigen::Index>(units));
    for (std::size_t n = 0; n < units; ++n)
      out.theta[i][n] = wrap_phase(2.0 * std::numbers::pi * s.uniform(std::uint32_t(i), std::uint32_t(n)));
  }
  return out;
}

BeamformingSet random_beamforming(std::size_t users, std::size_t antennas, double pt_watts, std::uint64_t seed) {
  const Substream s(seed, Stream::RandomBeam);
  BeamformingSet W;
  W.zero_channel.assign(users, false);
  for (std::size_t k = 0; k < users; ++k) {
    CVector v(static_cast<Eigen::Index>(antennas));
    for (std::size_t m = 0; m < antennas; ++m) v[m] = s.complex_normal(std::uint32_t(k), std::uint32_t(m), 0);
    W.w.push_back(v * (std::sqrt(pt_watts) / v.norm()));
  }
  return W;
}

}  // namespace irsa
