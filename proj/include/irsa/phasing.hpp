#pragma once

#include <cstdint>

#include "irsa/channel.hpp"
#include "irsa/rng.hpp"
#include "irsa/types.hpp"

namespace irsa {

// w_k = sqrt(P_t) v / |v| with v the composite channel of user k. A zero
// composite channel yields w_k = 0 and sets zero_channel[k].
BeamformingSet mrt_beamform(const ChannelSet& ch, const AssociationMatrix& A, const ReflectionSet& theta,
                            double pt_watts);

// Beamformers toward the direct channel only.
BeamformingSet direct_mrt(const ChannelSet& ch, double pt_watts);

// Phase of h_d[k]^H w_k, or 0 when that product vanishes.
double direct_phase(const ChannelSet& ch, const CVector& w_k, std::size_t k);

// Aligns every unit of each associated tile with its user's direct-path phase.
// Every tile must have exactly one owner.
ReflectionSet optimal_phases(const ChannelSet& ch, const AssociationMatrix& A, const BeamformingSet& W);

// As above, but tiles with no owner keep their phases from `previous`.
ReflectionSet optimal_phases(const ChannelSet& ch, const AssociationMatrix& A, const BeamformingSet& W,
                             const ReflectionSet& previous);

// Uniform phases in [0, 2 pi) drawn from substream `role`.
ReflectionSet random_phases(std::size_t tiles, std::size_t units, std::uint64_t seed, Stream role = Stream::RandomPhase);

// Isotropic random direction scaled to sqrt(P_t), one per user.
BeamformingSet random_beamforming(std::size_t users, std::size_t antennas, double pt_watts, std::uint64_t seed);

// Maps an angle into [0, 2 pi).
double wrap_phase(double angle);

}  // namespace irsa
