// One criterion per invocation: `acceptance N --work DIR --configs DIR`.
// Prints a single PASS/FAIL line and exits nonzero on failure.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>

#include "irsa/alternating.hpp"
#include "irsa/io.hpp"
#include "irsa/ml/dataset.hpp"
#include "irsa/ml/encoding.hpp"
#include "irsa/ml/fnn.hpp"
#include "irsa/ml/surrogate.hpp"
#include "irsa/parallel.hpp"
#include "irsa/phasing.hpp"
#include "irsa/rates.hpp"
#include "irsa/rng.hpp"

namespace fs = std::filesystem;
using namespace irsa;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

struct Paths {
  fs::path work, configs;
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

ValidatedScenario defaults(double pt_dbm = 40.0) {
  ScenarioConfig cfg;
  cfg.Pt_dbm = pt_dbm;
  return validate_config(cfg);
}

// 1 and 2 share the same 1000 realizations.
struct Alg2Run {
  bool feasible, monotone, converged;
  int iterations;
  double worst_alignment;
};

std::vector<Alg2Run> default_runs(std::size_t n) {
  const auto scn = defaults();
  std::vector<Alg2Run> out(n);
  parallel_for(n, [&](std::size_t r) {
    const std::uint64_t seed = mix_seed(1, r);
    const auto ch = draw_channels(scn, seed);
    const auto s = alternate(ch, scn);
    Alg2Run run{s.A.feasible(scn.quotas), true, s.converged, s.iterations, 0.0};
    for (std::size_t t = 1; t < s.trace.size(); ++t) run.monotone = run.monotone && s.trace[t] >= s.trace[t - 1];
    const auto g = link_gains(ch, s.A, s.theta, s.W);
    for (std::size_t k = 0; k < scn.K; ++k) {
      const double r_k = user_rate(ch, s.A, s.theta, s.W.w[k], scn.noise_watts, scn.bandwidth_hz, k);
      const double u_k = upper_bound_rate(g, s.A, scn.noise_watts, scn.bandwidth_hz, k);
      run.worst_alignment = std::max(run.worst_alignment, std::abs(u_k - r_k) / u_k);
    }
    out[r] = run;
  });
  return out;
}

Verdict criterion1(const Paths&) {
  Verdict v;
  const auto t0 = Clock::now();
  const auto runs = default_runs(1000);
  const double secs = since(t0);
  std::size_t feasible = 0, monotone = 0, converged = 0;
  int worst = 0;
  std::map<int, int> histogram;
  for (const auto& r : runs) {
    feasible += r.feasible;
    monotone += r.monotone;
    converged += r.converged && r.iterations <= 10;
    worst = std::max(worst, r.iterations);
    ++histogram[r.iterations];
  }
  v.require(feasible == runs.size(), "feasible association");
  v.require(monotone == runs.size(), "non-decreasing trace");
  v.require(converged == runs.size(), "converged within 10 iterations");
  v.require(secs < 120.0, "runtime under 2 minutes");
  v.detail << "1000 realizations: feasible " << feasible << ", monotone " << monotone << ", converged<=10 "
           << converged << ", max iterations " << worst << " (histogram";
  for (auto [it, c] : histogram) v.detail << ' ' << it << ':' << c;
  v.detail << "), " << fmt(secs, 3) << " s";
  return v;
}

Verdict criterion2(const Paths&) {
  Verdict v;
  const auto runs = default_runs(1000);
  double worst = 0.0;
  for (const auto& r : runs) worst = std::max(worst, r.worst_alignment);
  v.require(worst <= 1e-9, "user rate equals upper bound within 1e-9");
  v.detail << "max relative gap between achieved and upper-bound rate over 1000 realizations x 4 users: " << worst;
  return v;
}

Verdict criterion3(const Paths&) {
  Verdict v;
  const auto t0 = Clock::now();
  for (auto [K, I] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 3}}) {
    const auto scn = validate_config(with_users_and_tiles(ScenarioConfig{}, K, I));
    std::atomic<int> good = 0;
    std::vector<double> ratio(100);
    parallel_for(100, [&](std::size_t r) {
      const auto ch = draw_channels(scn, mix_seed(3, r));
      const double alg = alternate(ch, scn).trace.back();
      const double opt = exhaustive_search(ch, scn).trace.back();
      ratio[r] = alg / opt;
      if (alg >= 0.99 * opt) ++good;
    });
    v.require(good >= 95, "K=" + std::to_string(K) + " within 99% on 95 of 100");
    v.detail << "K=I=" << K << ": " << good << "/100 within 99% (min ratio "
             << fmt(*std::min_element(ratio.begin(), ratio.end()), 6) << "); ";
  }
  const double secs = since(t0);
  v.require(secs < 300.0, "runtime under 5 minutes");
  v.detail << fmt(secs, 3) << " s";
  return v;
}

Verdict criterion4(const Paths&) {
  Verdict v;
  const auto scn = defaults();
  const std::vector<CaseId> cases = {CaseId::I, CaseId::II, CaseId::III, CaseId::IV, CaseId::V, CaseId::VI};
  const auto mc = monte_carlo(scn, 200, cases, 4);
  auto m = [&](CaseId c) { return mc.of(c).mean; };
  const double I = m(CaseId::I), II = m(CaseId::II), III = m(CaseId::III), IV = m(CaseId::IV), V = m(CaseId::V),
               VI = m(CaseId::VI);
  v.require(std::abs(I - II) <= 0.01 * I, "case I within 1% of case II");
  v.require(II > III && III > IV && IV > std::max(V, VI), "ordering II > III > IV > max(V, VI)");
  v.require(II >= 1.15 * III, "II >= 1.15 III");
  v.require(IV >= 1.15 * V, "IV >= 1.15 V");
  v.detail << "200 realizations at 40 dBm, blockage 25 dB, mean sum rate (Mbit/s): I " << fmt(I / 1e6) << ", II "
           << fmt(II / 1e6) << ", III " << fmt(III / 1e6) << ", IV " << fmt(IV / 1e6) << ", V " << fmt(V / 1e6)
           << ", VI " << fmt(VI / 1e6) << "; II/III " << fmt(II / III) << ", IV/V " << fmt(IV / V);
  return v;
}

Verdict criterion5(const Paths& p) {
  Verdict v;
  const ScenarioConfig base = load_config((p.configs / "fig3_one_tile.json").string());
  for (double pt : {30.0, 35.0, 40.0}) {
    ScenarioConfig cfg = base;
    cfg.Pt_dbm = pt;
    const auto scn = validate_config(cfg);
    v.require(scn.I == 1, "one tile");
    const auto mc = monte_carlo(scn, 100, {CaseId::II, CaseId::VI}, 5);
    const double gain = mc.of(CaseId::II).mean / mc.of(CaseId::VI).mean;
    v.require(gain > 2.0, "case II > 2x case VI at " + fmt(pt) + " dBm");
    v.detail << fmt(pt) << " dBm: II/VI = " << fmt(gain) << "; ";
  }
  v.detail << "one " << base.Lx / base.wavelength << "x" << base.Ly / base.wavelength << " wavelength tile, blockage "
           << base.direct_blockage_db.front() << " dB, 100 realizations";
  return v;
}

Verdict criterion6(const Paths&) {
  Verdict v;
  for (double pt : {30.0, 35.0, 40.0, 42.0, 50.0}) {
    const auto mc = monte_carlo(defaults(pt), 200, {CaseId::II, CaseId::VII}, 6);
    const double II = mc.of(CaseId::II).mean, VII = mc.of(CaseId::VII).mean;
    const double gap = (II - VII) / II;
    const double limit = pt <= 42.0 ? 0.015 : 0.05;
    v.require(VII <= II && gap <= limit, "VII within " + fmt(100 * limit) + "% of II at " + fmt(pt) + " dBm");
    v.detail << fmt(pt) << " dBm: VII " << fmt(100 * gap, 3) << "% below II; ";
  }
  v.detail << "200 realizations per power";
  return v;
}

// Shared by 7 and 8: datasets and models cached under the work directory.
struct MlSize {
  std::string name;
  ValidatedScenario scn;
  ml::Dataset ds;
  std::map<std::size_t, ml::FnnModel> models;  // by hidden width
};

MlSize prepare_ml(const Paths& p, const std::string& name, std::ostream& log) {
  MlSize out{name, validate_config(load_config((p.configs / (name + ".json")).string())), {}, {}};
  const fs::path dir = p.work / name;
  fs::create_directories(dir);
  const auto csv = dir / "dataset.csv", meta = dir / "dataset_meta.json";
  const std::size_t S = 10000;
  bool cached = false;
  if (fs::exists(csv) && fs::exists(meta)) {
    out.ds = ml::load_dataset(csv.string(), meta.string());
    cached = out.ds.fingerprint == ml::scenario_fingerprint(out.scn) && out.ds.samples.size() == S;
  }
  if (!cached) {
    const auto t0 = Clock::now();
    out.ds = ml::generate_dataset(out.scn, S, 1);
    write_file_atomic(csv.string(), ml::dataset_csv(out.ds));
    write_file_atomic(meta.string(), ml::dataset_metadata(out.ds).dump());
    log << name << ": generated " << S << " samples in " << fmt(since(t0), 3) << " s; ";
    for (auto w : {10, 20}) fs::remove(dir / ("model_" + std::to_string(w) + ".json"));
  }
  for (std::size_t w : {10, 20}) {
    const auto path = dir / ("model_" + std::to_string(w) + ".json");
    if (fs::exists(path)) {
      out.models.emplace(w, ml::FnnModel::load(path.string()));
      continue;
    }
    const auto t0 = Clock::now();
    auto tr = ml::train_surrogate(out.ds, {w, w, w}, out.scn.config.ml, 1);
    tr.model.save(path.string());
    log << name << ": trained [" << w << "," << w << "," << w << "] in " << fmt(since(t0), 3) << " s ("
        << tr.lm.history.size() - 1 << " epochs, " << ml::stop_name(tr.lm.stop) << "); ";
    out.models.emplace(w, std::move(tr.model));
  }
  return out;
}

double majority_share(const ml::Dataset& ds, const std::vector<std::size_t>& idx) {
  std::map<std::vector<std::uint32_t>, int> count;
  for (auto s : idx) ++count[ds.samples[s].target];
  int best = 0;
  for (const auto& [k, c] : count) best = std::max(best, c);
  return 100.0 * best / static_cast<double>(idx.size());
}

Verdict criterion7(const Paths& p) {
  Verdict v;
  const auto t0 = Clock::now();
  for (const auto& [name, target] : {std::pair<std::string, double>{"ml_k2i2", 95.0}, {"ml_k4i4", 85.0}}) {
    const MlSize m = prepare_ml(p, name, v.detail);
    v.require(m.ds.train.size() == 7000 && m.ds.val.size() == 2000 && m.ds.test.size() == 1000, "70/20/10 split");
    const double a10 = ml::evaluate_surrogate(m.models.at(10), m.ds, m.ds.test, m.scn, false).accuracy;
    const double a20 = ml::evaluate_surrogate(m.models.at(20), m.ds, m.ds.test, m.scn, false).accuracy;
    v.require(a10 >= target, name + " [10,10,10] >= " + fmt(target) + "%");
    v.require(a20 >= a10 - 1.0, name + " [20,20,20] >= [10,10,10] - 1 point");
    v.detail << name << ": test accuracy [10,10,10] " << fmt(a10) << "%, [20,20,20] " << fmt(a20)
             << "% (most frequent test label " << fmt(majority_share(m.ds, m.ds.test)) << "%); ";
  }
  const double secs = since(t0);
  v.require(secs < 1800.0, "runtime under 30 minutes");
  v.detail << fmt(secs, 3) << " s";
  return v;
}

Verdict criterion8(const Paths& p) {
  Verdict v;
  for (const std::string name : {"ml_k2i2", "ml_k4i4"}) {
    const MlSize m = prepare_ml(p, name, v.detail);
    std::vector<std::size_t> all(m.ds.samples.size());
    std::iota(all.begin(), all.end(), 0);
    const auto b = ml::bench(m.models.at(10), m.ds, all, m.scn, false);
    v.require(b.speedup >= 10.0, name + " speedup >= 10x");
    v.detail << name << ": " << b.n << " samples, association solver " << fmt(1e3 * b.algorithm1_seconds) << " ms, surrogate "
             << fmt(1e3 * b.surrogate_seconds) << " ms, speedup " << fmt(b.speedup) << "x; ";
  }
  return v;
}

Verdict criterion9(const Paths&) {
  Verdict v;
  // MRT spends exactly the power budget.
  {
    const auto scn = defaults();
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto ch = draw_channels(scn, s);
      const auto A = random_association(scn.I, scn.quotas, s);
      for (const auto& w : mrt_beamform(ch, A, random_phases(scn.I, scn.N, s), scn.Pt_watts).w)
        worst = std::max(worst, std::abs(w.squaredNorm() - scn.Pt_watts) / scn.Pt_watts);
    }
    v.require(worst <= 1e-12, "MRT power");
    v.detail << "MRT power rel err " << worst << "; ";
  }
  // Every tile-to-user map with K, I <= 4 survives encode then decode.
  {
    std::size_t n = 0, bad = 0;
    for (std::size_t K = 1; K <= 4; ++K)
      for (std::size_t I = 1; I <= 4; ++I) {
        std::vector<std::size_t> owner(I, 0);
        for (bool more = true; more;) {
          const auto A = AssociationMatrix::from_owner(owner, K);
          bad += !(ml::decode_codes(ml::encode_association(A), K) == A);
          ++n;
          std::size_t i = 0;
          while (i < I && ++owner[i] == K) owner[i++] = 0;
          more = i < I;
        }
      }
    v.require(bad == 0 && n == 494, "encode/decode round trip");
    v.detail << "round trip " << n - bad << "/" << n << "; ";
  }
  // Analytic Jacobian against central differences.
  {
    double worst = 0.0;
    std::mt19937_64 gen(9);
    std::normal_distribution<double> nd;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      ml::FnnModel m = ml::FnnModel::random({6, 10, 10, 10, 4}, seed);
      for (std::size_t l = 0; l < m.layers(); ++l)
        for (auto& b : m.bias(l)) b = 0.3 * nd(gen);
      Eigen::VectorXd z(6);
      for (auto& x : z) x = nd(gen);
      const Eigen::MatrixXd J = m.jacobian(z);
      const Eigen::VectorXd p0 = m.parameters();
      for (Eigen::Index j = 0; j < p0.size(); ++j) {
        const double h = 1e-5 * std::max(1.0, std::abs(p0[j]));
        Eigen::VectorXd q = p0;
        q[j] += h;
        m.set_parameters(q);
        const Eigen::VectorXd up = m.forward_normalized(z);
        q[j] -= 2 * h;
        m.set_parameters(q);
        const Eigen::VectorXd fd = (up - m.forward_normalized(z)) / (2 * h);
        for (Eigen::Index o = 0; o < fd.size(); ++o)
          worst = std::max(worst, std::abs(fd[o] - J(o, j)) / std::max({std::abs(fd[o]), std::abs(J(o, j)), 1e-3}));
      }
    }
    v.require(worst <= 1e-5, "Jacobian");
    v.detail << "Jacobian rel err " << worst << "; ";
  }
  // Direct-link second moment: 1e5 draws against path loss times shadowing.
  {
    ScenarioConfig cfg = with_users_and_tiles(ScenarioConfig{}, 1, 1);
    cfg.M = 1;
    cfg.dx = cfg.Lx;
    cfg.dy = cfg.Ly;
    const auto scn = validate_config(cfg);
    const double expected = path_loss(scn.wavelength, scn.dist_direct[0]) * scn.direct_shadowing[0];
    const double expected_r = path_loss(scn.wavelength, scn.dist_tile_user[0][0]);
    double sum = 0.0, sum_r = 0.0;
    const std::size_t n = 100000;
    for (std::size_t s = 0; s < n; ++s) {
      const auto ch = draw_channels(scn, s);
      sum += std::norm(ch.h_d[0][0]);
      sum_r += std::norm(ch.h_r[0][0][0]);
    }
    const double err = std::abs(sum / n / expected - 1.0), err_r = std::abs(sum_r / n / expected_r - 1.0);
    v.require(err <= 0.02 && err_r <= 0.02, "Rayleigh second moment");
    v.detail << "second moment rel err " << fmt(err, 3) << " (direct), " << fmt(err_r, 3) << " (reflected); ";
  }
  // Minimum tile counts.
  {
    bool ok = required_tiles(0.1, 50, 10, 55, 1, 1) == 1 && required_tiles(0.1, 50, 10, 5, 1, 1) == 10;
    for (double d : {1.0, 4.0, 9.0}) ok = ok && required_tiles(0.01, d, d, d * 0.01 / (0.1 * 0.2), 0.1, 0.2) == d;
    ok = ok && derive_quotas(validate_config(with_users_and_tiles(ScenarioConfig{}, 2, 4))) ==
                   std::vector<std::size_t>{2, 2};
    v.require(ok, "minimum tile examples");
    v.detail << "minimum tile examples " << (ok ? "ok" : "wrong");
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance N [--work DIR] [--configs DIR]\n";
    return 2;
  }
  const int n = std::atoi(argv[1]);
  Paths p{fs::current_path() / "acceptance_work", fs::current_path() / "configs"};
  for (int a = 2; a + 1 < argc; a += 2) {
    const std::string flag = argv[a];
    if (flag == "--work") p.work = argv[a + 1];
    else if (flag == "--configs") p.configs = argv[a + 1];
  }
  fs::create_directories(p.work);

  static const std::map<int, std::function<Verdict(const Paths&)>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
  const auto it = criteria.find(n);
  if (it == criteria.end()) {
    std::cerr << "unknown criterion " << n << "\n";
    return 2;
  }
  Verdict v;
  try {
    v = it->second(p);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << "exception: " << e.what();
  }
  std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << v.detail.str() << std::endl;
  return v.pass ? 0 : 1;
}
