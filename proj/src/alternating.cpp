#include "irsa/alternating.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "irsa/error.hpp"
#include "irsa/parallel.hpp"
#include "irsa/rng.hpp"

namespace irsa {

std::string case_name(CaseId c) {
  static const char* names[] = {"I", "II", "III", "IV", "V", "VI", "VII"};
  return names[static_cast<int>(c) - 1];
}

CaseId parse_case(const std::string& name) {
  for (auto c : kAllCases)
    if (case_name(c) == name) return c;
  throw InvalidParameter("cases", "unknown case '" + name + "' (expected I..VII)");
}

double sum_upper_rate(const ChannelSet& ch, const AssociationMatrix& A, const BeamformingSet& W,
                      const ReflectionSet& theta, const ValidatedScenario& scn) {
  check_dimensions(ch, A, theta);
  if (W.w.size() != ch.K) throw DimensionMismatch("beamforming set has wrong user count");
  // Only associated pairs enter the bound, so the full gain table is skipped.
  double total = 0.0;
  for (std::size_t k = 0; k < ch.K; ++k) {
    double amp = std::abs(ch.h_d[k].dot(W.w[k]));
    for (std::size_t i = 0; i < ch.I; ++i)
      if (A(i, k)) amp += std::abs(reflected_term(ch, theta, i, k, W.w[k]));
    total += rate_from_snr(amp * amp / scn.noise_watts, scn.bandwidth_hz);
  }
  return total;
}

ReflectionSet initial_phases(const ChannelSet& ch) { return random_phases(ch.I, ch.N, ch.seed, Stream::InitPhase); }

namespace {

bool settled(const std::vector<double>& trace, double eps) {
  if (trace.size() < 2) return false;
  const double last = trace.back();
  return std::abs(last - trace[trace.size() - 2]) < eps * std::abs(last);
}

}  // namespace

Solution refine_fixed_association(const ChannelSet& ch, const ValidatedScenario& scn, const AssociationMatrix& A,
                                  const ReflectionSet& start) {
  Solution sol;
  sol.A = A;
  sol.theta = start;
  for (int it = 1; it <= scn.tol.max_iters_inner; ++it) {
    BeamformingSet W = mrt_beamform(ch, A, sol.theta, scn.Pt_watts);
    ReflectionSet theta = optimal_phases(ch, A, W, sol.theta);
    const double value = sum_upper_rate(ch, A, W, theta, scn);
    // A sweep that lowers the objective is discarded; the previous point is final.
    if (!sol.trace.empty() && value < sol.trace.back()) {
      sol.converged = true;
      break;
    }
    sol.W = std::move(W);
    sol.theta = std::move(theta);
    sol.trace.push_back(value);
    if (settled(sol.trace, scn.tol.eps_inner)) {
      sol.converged = true;
      break;
    }
  }
  sol.iterations = static_cast<int>(sol.trace.size());
  return sol;
}

Solution alternate(const ChannelSet& ch, const ValidatedScenario& scn) {
  Solution sol;
  sol.theta = initial_phases(ch);
  sol.W = direct_mrt(ch, scn.Pt_watts);
  std::optional<AssociationMatrix> previous;

  for (int it = 1; it <= scn.tol.max_iters_altern; ++it) {
    // Each tile's phases follow whichever user it serves, so pairs are scored aligned.
    const LinkGains g = aligned_gains(ch, sol.W);
    AssociationMatrix A = solve_association(g, scn, previous).A;
    Solution inner = refine_fixed_association(ch, scn, A, sol.theta);
    const double value = inner.trace.back();

    // An outer step that lowers the objective is rejected and ends the run.
    if (!sol.trace.empty() && value < sol.trace.back()) {
      sol.trace.push_back(sol.trace.back());
      sol.converged = true;
      break;
    }
    sol.A = A;
    sol.W = std::move(inner.W);
    sol.theta = std::move(inner.theta);
    sol.trace.push_back(value);
    previous = std::move(A);
    if (settled(sol.trace, scn.tol.eps_altern)) {
      sol.converged = true;
      break;
    }
  }
  sol.iterations = static_cast<int>(sol.trace.size());
  return sol;
}

std::vector<AssociationMatrix> enumerate_feasible(std::size_t tiles, const std::vector<std::size_t>& quotas) {
  const std::size_t users = quotas.size();
  if (std::accumulate(quotas.begin(), quotas.end(), std::size_t{0}) != tiles)
    throw InfeasibleQuota("quotas do not sum to the tile count");
  std::vector<AssociationMatrix> out;
  std::vector<std::size_t> owner(tiles, 0);
  std::vector<std::size_t> left = quotas;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == tiles) {
      out.push_back(AssociationMatrix::from_owner(owner, users));
      return;
    }
    for (std::size_t k = 0; k < users; ++k) {
      if (left[k] == 0) continue;
      --left[k];
      owner[i] = k;
      self(self, i + 1);
      ++left[k];
    }
  };
  rec(rec, 0);
  return out;
}

Solution exhaustive_search(const ChannelSet& ch, const ValidatedScenario& scn) {
  const double space = std::pow(static_cast<double>(ch.K), static_cast<double>(ch.I));
  if (space > scn.tol.exhaustive_cap)
    throw ComplexityCap("exhaustive search is O(K^I) = " + std::to_string(space) + " evaluations, above the cap of " +
                        std::to_string(scn.tol.exhaustive_cap));
  const auto candidates = enumerate_feasible(ch.I, scn.quotas);
  const ReflectionSet start = initial_phases(ch);
  Solution best;
  bool have = false;
  for (const auto& A : candidates) {
    Solution s = refine_fixed_association(ch, scn, A, start);
    if (!have || s.trace.back() > best.trace.back()) {
      best = std::move(s);
      have = true;
    }
  }
  best.candidates = candidates.size();
  return best;
}

AssociationMatrix random_association(std::size_t tiles, const std::vector<std::size_t>& quotas, std::uint64_t seed) {
  if (std::accumulate(quotas.begin(), quotas.end(), std::size_t{0}) != tiles)
    throw InfeasibleQuota("quotas do not sum to the tile count");
  std::vector<std::size_t> owner;
  for (std::size_t k = 0; k < quotas.size(); ++k) owner.insert(owner.end(), quotas[k], k);
  const Substream s(seed, Stream::RandomAssociation);
  for (std::size_t j = owner.size(); j > 1; --j) {
    const auto pick = static_cast<std::size_t>(s.uniform(static_cast<std::uint32_t>(j)) * static_cast<double>(j));
    std::swap(owner[j - 1], owner[std::min(pick, j - 1)]);
  }
  return AssociationMatrix::from_owner(owner, quotas.size());
}

namespace {

RateReport direct_only_report(const ChannelSet& ch, const ValidatedScenario& scn) {
  const BeamformingSet W = direct_mrt(ch, scn.Pt_watts);
  RateReport rep;
  for (std::size_t k = 0; k < ch.K; ++k) {
    const double r = rate_from_snr(std::norm(ch.h_d[k].dot(W.w[k])) / scn.noise_watts, scn.bandwidth_hz);
    rep.r.push_back(r);
    rep.r_upper.push_back(r);
    rep.r_intf.push_back(r);
    rep.sum_rate += r;
  }
  rep.sum_upper = rep.sum_intf = rep.sum_rate;
  return rep;
}

CaseOutcome from_solution(const ChannelSet& ch, const ValidatedScenario& scn, const Solution& s) {
  return {rate_report(ch, s.A, s.W, s.theta, scn), s.iterations};
}

}  // namespace

CaseOutcome run_case(const ChannelSet& ch, const ValidatedScenario& scn, CaseId c) {
  switch (c) {
    case CaseId::I:
      return from_solution(ch, scn, exhaustive_search(ch, scn));
    case CaseId::II:
    case CaseId::VII:
      return from_solution(ch, scn, alternate(ch, scn));
    case CaseId::III: {
      const auto A = random_association(ch.I, scn.quotas, ch.seed);
      return from_solution(ch, scn, refine_fixed_association(ch, scn, A, initial_phases(ch)));
    }
    case CaseId::IV: {
      const auto A = random_association(ch.I, scn.quotas, ch.seed);
      const auto W = random_beamforming(ch.K, ch.M, scn.Pt_watts, ch.seed);
      const auto theta = optimal_phases(ch, A, W);
      return {rate_report(ch, A, W, theta, scn), 1};
    }
    case CaseId::V: {
      const auto A = random_association(ch.I, scn.quotas, ch.seed);
      const auto theta = random_phases(ch.I, ch.N, ch.seed);
      const auto W = mrt_beamform(ch, A, theta, scn.Pt_watts);
      return {rate_report(ch, A, W, theta, scn), 1};
    }
    case CaseId::VI:
      return {direct_only_report(ch, scn), 1};
  }
  throw InvalidParameter("case", "unknown case");
}

double case_sum_rate(CaseId c, const RateReport& rep) { return c == CaseId::VII ? rep.sum_intf : rep.sum_rate; }

const CaseSummary& MonteCarloResult::of(CaseId c) const {
  for (const auto& s : summary)
    if (s.c == c) return s;
  throw InvalidParameter("cases", "case " + case_name(c) + " was not run");
}

MonteCarloResult monte_carlo(const ValidatedScenario& scn, std::size_t n_realizations,
                             const std::vector<CaseId>& cases, std::uint64_t base_seed) {
  if (n_realizations < 1) throw InvalidParameter("realizations", "must be at least 1");
  if (cases.empty()) throw InvalidParameter("cases", "no case requested");
  std::vector<std::vector<RealizationRecord>> per(n_realizations);

  parallel_for(n_realizations, [&](std::size_t r) {
    const std::uint64_t seed = mix_seed(base_seed, r);
    const ValidatedScenario rs = realization_scenario(scn, seed);
    const ChannelSet ch = draw_channels(rs, seed);
    std::optional<CaseOutcome> proposed;  // shared by cases II and VII
    for (auto c : cases) {
      CaseOutcome out;
      if (c == CaseId::II || c == CaseId::VII) {
        if (!proposed) proposed = run_case(ch, rs, CaseId::II);
        out = *proposed;
      } else {
        out = run_case(ch, rs, c);
      }
      per[r].push_back({c, r, seed, case_sum_rate(c, out.report), out.report.sum_upper, out.report.sum_intf,
                        out.iterations});
    }
  });

  MonteCarloResult res;
  for (auto& v : per) res.records.insert(res.records.end(), v.begin(), v.end());
  for (auto c : cases) {
    CaseSummary s{c};
    double sum = 0.0, sq = 0.0;
    for (const auto& rec : res.records)
      if (rec.c == c) sum += rec.sum_rate, sq += rec.sum_rate * rec.sum_rate, ++s.n;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
      const double var = std::max(0.0, (sq - s.n * s.mean * s.mean) / static_cast<double>(s.n - 1));
      s.std_error = std::sqrt(var / static_cast<double>(s.n));
    }
    res.summary.push_back(s);
  }
  return res;
}

}  // namespace irsa
