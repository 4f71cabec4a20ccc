#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irsa/association.hpp"
#include "irsa/channel.hpp"
#include "irsa/phasing.hpp"
#include "irsa/rates.hpp"
#include "irsa/scenario.hpp"

namespace irsa {

struct Solution {
  AssociationMatrix A;
  BeamformingSet W;
  ReflectionSet theta;
  std::vector<double> trace;  // sum of upper-bound rates after each iteration
  int iterations = 0;
  bool converged = false;
  std::size_t candidates = 1;  // associations examined (exhaustive search)
};

enum class CaseId { I = 1, II, III, IV, V, VI, VII };

inline constexpr CaseId kAllCases[] = {CaseId::I, CaseId::II, CaseId::III, CaseId::IV,
                                       CaseId::V, CaseId::VI, CaseId::VII};

std::string case_name(CaseId c);
CaseId parse_case(const std::string& name);

double sum_upper_rate(const ChannelSet& ch, const AssociationMatrix& A, const BeamformingSet& W,
                      const ReflectionSet& theta, const ValidatedScenario& scn);

// Starting point shared by every solver: seeded uniform phases, direct MRT.
ReflectionSet initial_phases(const ChannelSet& ch);

// Beamforming and reflection alternated to convergence for a fixed association.
Solution refine_fixed_association(const ChannelSet& ch, const ValidatedScenario& scn, const AssociationMatrix& A,
                                  const ReflectionSet& start);

// Association, beamforming and reflection alternated until the relative
// change of the summed upper-bound rate drops below eps_altern.
Solution alternate(const ChannelSet& ch, const ValidatedScenario& scn);

// All I x K matrices with one owner per tile and N_k tiles per user.
std::vector<AssociationMatrix> enumerate_feasible(std::size_t tiles, const std::vector<std::size_t>& quotas);

Solution exhaustive_search(const ChannelSet& ch, const ValidatedScenario& scn);

// Uniformly random matrix meeting the quotas, drawn from the channel seed.
AssociationMatrix random_association(std::size_t tiles, const std::vector<std::size_t>& quotas, std::uint64_t seed);

struct CaseOutcome {
  RateReport report;
  int iterations = 0;
};

CaseOutcome run_case(const ChannelSet& ch, const ValidatedScenario& scn, CaseId c);

// The sum rate a case is judged by: the interference-aware sum for case VII,
// the plain sum rate otherwise.
double case_sum_rate(CaseId c, const RateReport& rep);

struct RealizationRecord {
  CaseId c;
  std::size_t realization;
  std::uint64_t seed;
  double sum_rate, sum_upper, sum_intf;
  int iterations;
};

struct CaseSummary {
  CaseId c;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

struct MonteCarloResult {
  std::vector<RealizationRecord> records;  // realization-major, cases in request order
  std::vector<CaseSummary> summary;
  const CaseSummary& of(CaseId c) const;
};

// Realization r uses channel seed mix_seed(base_seed, r); all cases share it.
MonteCarloResult monte_carlo(const ValidatedScenario& scn, std::size_t n_realizations,
                             const std::vector<CaseId>& cases, std::uint64_t base_seed);

}  // namespace irsa
