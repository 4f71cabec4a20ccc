#include <doctest.h>

#include <numbers>
#include <random>

#include "irsa/error.hpp"
#include "irsa/phasing.hpp"
#include "irsa/rates.hpp"
#include "support.hpp"

using namespace irsa;
using irsa::testing::channels;

TEST_SUITE("phasing") {
  TEST_CASE("direct MRT example") {
    const auto ch = channels(1, 2, 1, 1, [](int role, std::size_t, std::size_t, std::size_t m) {
      return role == 0 ? (m == 0 ? cd(1, 0) : cd(0, 1)) : cd(0.0);
    });
    ReflectionSet t;
    t.theta.assign(1, Eigen::VectorXd::Zero(1));
    const auto W = mrt_beamform(ch, AssociationMatrix(1, 1), t, 2.0);
    CHECK(std::abs(W.w[0][0] - cd(1, 0)) < 1e-15);
    CHECK(std::abs(W.w[0][1] - cd(0, 1)) < 1e-15);
  }

  TEST_CASE("MRT power equality and direct gain") {
    const auto scn = testing::small_scenario(3, 4);
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto ch = draw_channels(scn, s);
      const auto theta = random_phases(4, scn.N, s);
      const auto A = AssociationMatrix::from_owner({s % 3, (s + 1) % 3, (s + 2) % 3, s % 3}, 3);
      const auto W = mrt_beamform(ch, A, theta, scn.Pt_watts);
      for (const auto& w : W.w) CHECK(std::abs(w.squaredNorm() - scn.Pt_watts) <= 1e-12 * scn.Pt_watts);
      const auto D = direct_mrt(ch, scn.Pt_watts);
      const auto g = link_gains(ch, A, theta, D);
      for (std::size_t k = 0; k < 3; ++k)
        CHECK(g.beta_d[k] == doctest::Approx(std::sqrt(scn.Pt_watts) * ch.h_d[k].norm()).epsilon(1e-12));
    }
  }

  TEST_CASE("zero composite channel sets the flag") {
    const auto ch = channels(2, 2, 1, 1, [](int role, std::size_t k, std::size_t, std::size_t) {
      return role == 0 ? cd(k == 0 ? 0.0 : 1.0) : cd(0.0);
    });
    ReflectionSet t;
    t.theta.assign(1, Eigen::VectorXd::Zero(1));
    const auto W = mrt_beamform(ch, AssociationMatrix(1, 2), t, 1.0);
    CHECK(W.zero_channel[0]);
    CHECK(!W.zero_channel[1]);
    CHECK(W.w[0].norm() == 0.0);
    CHECK_THROWS_AS(mrt_beamform(ch, AssociationMatrix(1, 2), t, 0.0), InvalidParameter);
  }

  TEST_CASE("optimal phase examples") {
    const auto real = channels(1, 1, 1, 1, [](int, std::size_t, std::size_t, std::size_t) { return cd(2.0); });
    const BeamformingSet W{{CVector::Ones(1)}, {false}};
    const auto A = AssociationMatrix::from_owner({0}, 1);
    CHECK(optimal_phases(real, A, W).theta[0][0] == doctest::Approx(0.0));

    // h_r = e^{-j pi/4}, h_t w = 1, h_d^H w = 1: Phi = pi/4, Psi = 0.
    const auto rot = channels(1, 1, 1, 1, [](int role, std::size_t, std::size_t, std::size_t) {
      return role == 2 ? std::polar(1.0, -std::numbers::pi / 4) : cd(1.0);
    });
    const auto theta = optimal_phases(rot, A, W);
    CHECK(theta.theta[0][0] == doctest::Approx(7 * std::numbers::pi / 4).epsilon(1e-12));
    CHECK(std::abs(std::arg(reflected_term(rot, theta, 0, 0, W.w[0]))) < 1e-12);
  }

  TEST_CASE("alignment makes the upper bound tight") {
    const auto scn = testing::small_scenario(3, 4);
    std::mt19937_64 gen(2);
    for (int t = 0; t < 200; ++t) {
      const auto ch = draw_channels(scn, gen());
      std::vector<std::size_t> owner(4);
      for (auto& o : owner) o = gen() % 3;
      const auto A = AssociationMatrix::from_owner(owner, 3);
      const auto W = mrt_beamform(ch, A, random_phases(4, scn.N, gen()), scn.Pt_watts);
      const auto theta = optimal_phases(ch, A, W);
      const auto rep = rate_report(ch, A, W, theta, scn);
      for (std::size_t k = 0; k < 3; ++k) {
        CHECK(testing::rel_diff(rep.r[k], rep.r_upper[k]) <= 1e-9);
        const double psi = direct_phase(ch, W.w[k], k);
        for (std::size_t i = 0; i < 4; ++i) {
          if (owner[i] != k) continue;
          const CVector gw = ch.G[i] * W.w[k];
          for (std::size_t n = 0; n < scn.N; ++n) {
            const cd term = std::conj(ch.h_r[i][k][n]) * std::polar(1.0, theta.theta[i][n]) * gw[n];
            CHECK(std::abs(std::remainder(std::arg(term) - psi, 2 * std::numbers::pi)) < 1e-9);
          }
        }
      }
      for (const auto& th : theta.theta)
        for (double v : th) {
          CHECK(v >= 0.0);
          CHECK(v < 2 * std::numbers::pi);
          CHECK(std::abs(std::polar(1.0, v)) == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
  }

  TEST_CASE("zero direct channel uses a zero reference phase") {
    const auto ch = channels(1, 1, 1, 1, [](int role, std::size_t, std::size_t, std::size_t) {
      return role == 0 ? cd(0.0) : std::polar(1.0, 1.0);
    });
    const BeamformingSet W{{CVector::Ones(1)}, {false}};
    CHECK(direct_phase(ch, W.w[0], 0) == 0.0);
    const auto A = AssociationMatrix::from_owner({0}, 1);
    const auto theta = optimal_phases(ch, A, W);
    CHECK(std::abs(std::arg(reflected_term(ch, theta, 0, 0, W.w[0]))) < 1e-12);
  }

  TEST_CASE("unassociated tiles") {
    const auto ch = testing::random_channels(2, 2, 2, 3, 1);
    const auto W = direct_mrt(ch, 1.0);
    AssociationMatrix A(2, 2);
    A.set(0, 1, true);
    CHECK_THROWS_AS(optimal_phases(ch, A, W), InvalidParameter);
    const auto prev = random_phases(2, 3, 4);
    const auto theta = optimal_phases(ch, A, W, prev);
    CHECK(theta.theta[1] == prev.theta[1]);
    A.set(0, 0, true);  // shared tile
    CHECK_THROWS_AS(optimal_phases(ch, A, W, prev), InvalidParameter);
  }

  TEST_CASE("optimal phases beat random phases on average") {
    const auto scn = testing::small_scenario(2, 2);
    double opt = 0.0, rnd = 0.0;
    const auto A = AssociationMatrix::from_owner({0, 1}, 2);
    for (std::uint64_t s = 0; s < 1000; ++s) {
      const auto ch = draw_channels(scn, s);
      const auto W = direct_mrt(ch, scn.Pt_watts);
      opt += rate_report(ch, A, W, optimal_phases(ch, A, W), scn).sum_rate;
      rnd += rate_report(ch, A, W, random_phases(2, scn.N, s), scn).sum_rate;
    }
    CHECK(opt > rnd);
  }

  TEST_CASE("random beamforming has full power") {
    const auto W = random_beamforming(3, 5, 2.5, 9);
    for (const auto& w : W.w) CHECK(w.squaredNorm() == doctest::Approx(2.5).epsilon(1e-12));
  }

  TEST_CASE("wrap_phase") {
    CHECK(wrap_phase(-0.5) == doctest::Approx(2 * std::numbers::pi - 0.5));
    CHECK(wrap_phase(2 * std::numbers::pi) == 0.0);
    CHECK(wrap_phase(7.0) == doctest::Approx(7.0 - 2 * std::numbers::pi));
  }
}
