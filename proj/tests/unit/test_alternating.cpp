#include <doctest.h>

#include <random>

#include "irsa/alternating.hpp"
#include "irsa/error.hpp"
#include "irsa/phasing.hpp"
#include "irsa/rates.hpp"
#include "irsa/rng.hpp"
#include "support.hpp"

using namespace irsa;

namespace {

void check_trace(const Solution& s) {
  for (std::size_t t = 1; t < s.trace.size(); ++t) CHECK(s.trace[t] >= s.trace[t - 1] - 1e-12);
}

}  // namespace

TEST_SUITE("alternating") {
  TEST_CASE("single user, single tile") {
    const auto scn = testing::small_scenario(1, 1);
    const auto ch = draw_channels(scn, 3);
    const auto s = alternate(ch, scn);
    CHECK(s.A == AssociationMatrix::from_owner({0}, 1));
    CHECK(s.converged);
    check_trace(s);
    const auto ex = exhaustive_search(ch, scn);
    CHECK(ex.candidates == 1);
    CHECK(ex.trace.back() == doctest::Approx(s.trace.back()).epsilon(1e-6));
  }

  TEST_CASE("trace is monotone and the bound is tight") {
    for (auto [K, I] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 4}, {4, 4}}) {
      const auto scn = testing::small_scenario(K, I);
      for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto ch = draw_channels(scn, seed);
        const auto s = alternate(ch, scn);
        check_trace(s);
        CHECK(s.A.feasible(scn.quotas));
        CHECK(s.trace.back() >= s.trace.front());
        const auto rep = rate_report(ch, s.A, s.W, s.theta, scn);
        for (std::size_t k = 0; k < K; ++k) {
          CHECK(testing::rel_diff(rep.r[k], rep.r_upper[k]) <= 1e-9);
          CHECK(rep.r_intf[k] <= rep.r[k] * (1 + 1e-12));
        }
      }
    }
  }

  TEST_CASE("inner refinement keeps its association") {
    const auto scn = testing::small_scenario(2, 3);
    const auto ch = draw_channels(scn, 5);
    const auto A = random_association(3, scn.quotas, 5);
    const auto s = refine_fixed_association(ch, scn, A, initial_phases(ch));
    CHECK(s.A == A);
    CHECK(s.converged);
    check_trace(s);
  }

  TEST_CASE("enumeration") {
    CHECK(enumerate_feasible(2, {1, 1}).size() == 2);
    CHECK(enumerate_feasible(4, {2, 2}).size() == 6);
    CHECK(enumerate_feasible(4, {1, 1, 1, 1}).size() == 24);
    for (const auto& A : enumerate_feasible(5, {2, 1, 2})) CHECK(A.feasible({2, 1, 2}));
    CHECK_THROWS_AS(enumerate_feasible(3, {1, 1}), InfeasibleQuota);

    const auto scn = testing::small_scenario(2, 2);
    CHECK(exhaustive_search(draw_channels(scn, 1), scn).candidates == 2);
  }

  TEST_CASE("exhaustive search refuses large spaces") {
    auto scn = testing::small_scenario(2, 4);
    scn.tol.exhaustive_cap = 10;
    CHECK_THROWS_AS(exhaustive_search(draw_channels(scn, 1), scn), ComplexityCap);
  }

  TEST_CASE("random association meets the quotas") {
    for (std::uint64_t s = 0; s < 100; ++s) CHECK(random_association(5, {2, 1, 2}, s).feasible({2, 1, 2}));
    CHECK(random_association(5, {2, 1, 2}, 4) == random_association(5, {2, 1, 2}, 4));
  }

  TEST_CASE("case VI ignores the reflecting surface") {
    const auto scn = testing::small_scenario(2, 2);
    auto ch = draw_channels(scn, 7);
    const double before = run_case(ch, scn, CaseId::VI).report.sum_rate;
    for (auto& row : ch.h_r)
      for (auto& h : row) h *= 3.0;
    for (auto& g : ch.G) g.setRandom();
    CHECK(run_case(ch, scn, CaseId::VI).report.sum_rate == before);
  }

  TEST_CASE("case VII never beats case II") {
    const auto scn = testing::small_scenario(3, 4);
    for (std::uint64_t s = 0; s < 30; ++s) {
      const auto ch = draw_channels(scn, s);
      const auto rep = run_case(ch, scn, CaseId::II).report;
      CHECK(case_sum_rate(CaseId::VII, rep) <= case_sum_rate(CaseId::II, rep) * (1 + 1e-12));
    }
  }

  TEST_CASE("case names") {
    CHECK(std::size(kAllCases) == 7);
    for (auto c : kAllCases) CHECK(parse_case(case_name(c)) == c);
    CHECK_THROWS_AS(parse_case("VIII"), InvalidParameter);
  }

  TEST_CASE("monte carlo with one realization equals run_case") {
    const auto scn = testing::small_scenario(2, 2);
    const std::vector<CaseId> cases(std::begin(kAllCases), std::end(kAllCases));
    const auto mc = monte_carlo(scn, 1, cases, 42);
    const std::uint64_t seed = mix_seed(42, 0);
    const auto rs = realization_scenario(scn, seed);
    const auto ch = draw_channels(rs, seed);
    for (auto c : cases) {
      const auto out = run_case(ch, rs, c == CaseId::VII ? CaseId::II : c);
      CHECK(mc.of(c).mean == case_sum_rate(c, out.report));
      CHECK(mc.of(c).n == 1);
    }
    CHECK_THROWS_AS(monte_carlo(scn, 0, cases, 1), InvalidParameter);
  }

  TEST_CASE("determinism") {
    const auto scn = testing::small_scenario(3, 3);
    const auto ch = draw_channels(scn, 77);
    const auto a = alternate(ch, scn), b = alternate(ch, scn);
    CHECK(a.A == b.A);
    CHECK(a.trace == b.trace);
    for (std::size_t k = 0; k < 3; ++k) CHECK(a.W.w[k] == b.W.w[k]);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.theta.theta[i] == b.theta.theta[i]);

    const std::vector<CaseId> cases = {CaseId::II, CaseId::III, CaseId::VI};
    const auto m1 = monte_carlo(scn, 6, cases, 9), m2 = monte_carlo(scn, 6, cases, 9);
    for (std::size_t r = 0; r < m1.records.size(); ++r) CHECK(m1.records[r].sum_rate == m2.records[r].sum_rate);
  }

  TEST_CASE("doubling the realizations keeps the means consistent") {
    const auto scn = testing::small_scenario(2, 2);
    const std::vector<CaseId> cases = {CaseId::II, CaseId::V};
    const auto a = monte_carlo(scn, 60, cases, 3), b = monte_carlo(scn, 120, cases, 3);
    for (auto c : cases) {
      const double se = std::max(a.of(c).std_error, b.of(c).std_error);
      CHECK(std::abs(a.of(c).mean - b.of(c).mean) <= 3 * se);
    }
  }

  TEST_CASE("proposed sum rate grows with power") {
    double last = 0.0;
    for (double p : {30.0, 40.0, 50.0}) {
      const auto m = monte_carlo(testing::scenario(2, 2, p), 10, {CaseId::II}, 1);
      CHECK(m.of(CaseId::II).mean >= last);
      last = m.of(CaseId::II).mean;
    }
  }
}
