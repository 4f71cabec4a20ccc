#include "irsa/ml/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "irsa/alternating.hpp"
#include "irsa/error.hpp"
#include "irsa/io.hpp"
#include "irsa/ml/encoding.hpp"
#include "irsa/parallel.hpp"
#include "irsa/rng.hpp"

namespace irsa::ml {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr int kPairRounds = 3;
constexpr int kMaxRedraws = 100;

}  // namespace

std::size_t feature_count(std::size_t users, std::size_t tiles) { return users + tiles * users; }

LinkGains pair_gains(const ChannelSet& ch, double pt_watts) {
  const double amp = std::sqrt(pt_watts);
  LinkGains g;
  g.beta_d.resize(static_cast<Eigen::Index>(ch.K));
  g.beta_r.resize(static_cast<Eigen::Index>(ch.I), static_cast<Eigen::Index>(ch.K));
  for (std::size_t k = 0; k < ch.K; ++k) {
    const CVector& hd = ch.h_d[k];
    const double hd_norm = hd.norm();
    g.beta_d[k] = amp * hd_norm;
    const CVector w0 = hd_norm > 0.0 ? CVector(hd * (amp / hd_norm)) : CVector::Zero(hd.size());
    for (std::size_t i = 0; i < ch.I; ++i) {
      const auto& hr = ch.h_r[i][k];
      CVector w = w0;
      CVector gw = ch.G[i] * w;
      for (int round = 0; round < kPairRounds; ++round) {
        // Align every unit with the direct path, then beamform toward the result.
        const cd d = hd.dot(w);
        const cd target = d == cd(0.0) ? cd(1.0) : d / std::abs(d);
        CVector x(static_cast<Eigen::Index>(ch.N));
        for (std::size_t n = 0; n < ch.N; ++n) {
          const cd p = std::conj(hr[n]) * gw[n];
          const cd phase = p == cd(0.0) ? target : target * std::abs(p) / p;  // e^{j theta_n}
          x[n] = std::conj(phase) * hr[n];
        }
        const CVector v = hd + ch.G[i].adjoint() * x;
        const double vn = v.norm();
        if (vn == 0.0) break;
        w = v * (amp / vn);
        gw = ch.G[i] * w;
      }
      double beta = 0.0;
      for (std::size_t n = 0; n < ch.N; ++n) beta += std::abs(hr[n]) * std::abs(gw[n]);
      g.beta_r(i, k) = beta;
    }
  }
  return g;
}

VectorXd features_from_gains(const LinkGains& g) {
  const auto K = g.beta_d.size(), I = g.beta_r.rows();
  VectorXd f(K + I * K);
  f.head(K) = g.beta_d;
  for (Eigen::Index i = 0; i < I; ++i)
    for (Eigen::Index k = 0; k < K; ++k) f[K + i * K + k] = g.beta_r(i, k);
  return f;
}

LinkGains gains_from_features(const VectorXd& f, std::size_t users, std::size_t tiles) {
  if (static_cast<std::size_t>(f.size()) != feature_count(users, tiles))
    throw DimensionMismatch("feature vector has " + std::to_string(f.size()) + " entries");
  const auto K = static_cast<Eigen::Index>(users), I = static_cast<Eigen::Index>(tiles);
  LinkGains g;
  g.beta_d = f.head(K);
  g.beta_r.resize(I, K);
  for (Eigen::Index i = 0; i < I; ++i)
    for (Eigen::Index k = 0; k < K; ++k) g.beta_r(i, k) = f[K + i * K + k];
  return g;
}

std::vector<std::uint32_t> label_channels(const ChannelSet& ch, const ValidatedScenario& scn) {
  return encode_association(alternate(ch, scn).A);
}

std::string scenario_fingerprint(const ValidatedScenario& scn) {
  auto j = config_to_json(scn.config);
  j.erase("ml");
  return sha1_hex(j.dump());
}

void split_indices(std::size_t S, std::uint64_t seed, double train_fraction, double val_fraction,
                   std::vector<std::size_t>& train, std::vector<std::size_t>& val, std::vector<std::size_t>& test) {
  if (train_fraction <= 0.0 || val_fraction < 0.0 || train_fraction + val_fraction > 1.0)
    throw InvalidParameter("ml", "split fractions must be positive and sum to at most 1");
  std::vector<std::size_t> order(S);
  std::iota(order.begin(), order.end(), 0);
  const Substream rng(seed, Stream::Split);
  for (std::size_t j = S; j > 1; --j) {
    const auto pick = static_cast<std::size_t>(rng.uniform(static_cast<std::uint32_t>(j)) * static_cast<double>(j));
    std::swap(order[j - 1], order[std::min(pick, j - 1)]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(S) * train_fraction));
  const auto n_val = std::min(S - n_train, static_cast<std::size_t>(std::llround(static_cast<double>(S) * val_fraction)));
  train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
             order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
}

Dataset generate_dataset(const ValidatedScenario& scn, std::size_t S, std::uint64_t seed) {
  if (S < 10) throw InvalidParameter("samples", "at least 10 samples required");
  Dataset ds;
  ds.K = scn.K;
  ds.I = scn.I;
  ds.seed = seed;
  ds.fingerprint = scenario_fingerprint(scn);
  ds.quotas = scn.quotas;
  ds.samples.resize(S);
  std::vector<std::size_t> redraws(S, 0);

  parallel_for(S, [&](std::size_t s) {
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t cs = mix_seed(mix_seed(seed, s), static_cast<std::uint64_t>(attempt));
      try {
        const ValidatedScenario rs = realization_scenario(scn, cs);
        if (rs.quotas != scn.quotas) throw InfeasibleQuota("user drop changes the tile quotas");
        const ChannelSet ch = draw_channels(rs, cs);
        Sample out;
        out.features = features_from_gains(pair_gains(ch, rs.Pt_watts));
        out.target = label_channels(ch, rs);
        out.channel_seed = cs;
        ds.samples[s] = std::move(out);
        return;
      } catch (const Error&) {
        if (attempt + 1 >= kMaxRedraws) throw;
        ++redraws[s];
      }
    }
  });
  ds.redraws = std::accumulate(redraws.begin(), redraws.end(), std::size_t{0});
  split_indices(S, seed, scn.config.ml.train_fraction, scn.config.ml.val_fraction, ds.train, ds.val, ds.test);
  return ds;
}

MatrixXd feature_matrix(const Dataset& ds, const std::vector<std::size_t>& idx) {
  MatrixXd X(static_cast<Eigen::Index>(feature_count(ds.K, ds.I)), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) X.col(static_cast<Eigen::Index>(j)) = ds.samples[idx[j]].features;
  return X;
}

MatrixXd target_matrix(const Dataset& ds, const std::vector<std::size_t>& idx) {
  MatrixXd T(static_cast<Eigen::Index>(ds.I), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j)
    for (std::size_t i = 0; i < ds.I; ++i)
      T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ds.samples[idx[j]].target[i];
  return T;
}

std::string dataset_csv(const Dataset& ds) {
  std::ostringstream out;
  for (std::size_t k = 1; k <= ds.K; ++k) out << "bd_" << k << ',';
  for (std::size_t i = 1; i <= ds.I; ++i)
    for (std::size_t k = 1; k <= ds.K; ++k) out << "br_" << i << '_' << k << ',';
  for (std::size_t i = 1; i <= ds.I; ++i) out << "code_" << i << (i == ds.I ? '\n' : ',');
  char buf[32];
  for (const auto& s : ds.samples) {
    for (Eigen::Index f = 0; f < s.features.size(); ++f) {
      std::snprintf(buf, sizeof buf, "%.17g", s.features[f]);
      out << buf << ',';
    }
    for (std::size_t i = 0; i < ds.I; ++i) out << s.target[i] << (i + 1 == ds.I ? '\n' : ',');
  }
  return out.str();
}

nlohmann::json dataset_metadata(const Dataset& ds) {
  std::vector<std::uint64_t> seeds;
  for (const auto& s : ds.samples) seeds.push_back(s.channel_seed);
  return {{"seed", ds.seed},       {"fingerprint", ds.fingerprint}, {"K", ds.K},
          {"I", ds.I},             {"quotas", ds.quotas},           {"samples", ds.samples.size()},
          {"redraws", ds.redraws}, {"train", ds.train},             {"val", ds.val},
          {"test", ds.test},       {"channel_seeds", seeds}};
}

Dataset load_dataset(const std::string& csv_path, const std::string& meta_path) {
  const auto meta = nlohmann::json::parse(read_file(meta_path));
  Dataset ds;
  ds.K = meta.at("K").get<std::size_t>();
  ds.I = meta.at("I").get<std::size_t>();
  ds.seed = meta.at("seed").get<std::uint64_t>();
  ds.fingerprint = meta.at("fingerprint").get<std::string>();
  ds.quotas = meta.at("quotas").get<std::vector<std::size_t>>();
  ds.redraws = meta.at("redraws").get<std::size_t>();
  ds.train = meta.at("train").get<std::vector<std::size_t>>();
  ds.val = meta.at("val").get<std::vector<std::size_t>>();
  ds.test = meta.at("test").get<std::vector<std::size_t>>();
  const auto seeds = meta.at("channel_seeds").get<std::vector<std::uint64_t>>();

  std::istringstream in(read_file(csv_path));
  std::string line;
  bool header = false;
  const std::size_t F = feature_count(ds.K, ds.I);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    Sample s;
    s.features.resize(static_cast<Eigen::Index>(F));
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      if (col < F)
        s.features[static_cast<Eigen::Index>(col)] = std::stod(cell);
      else
        s.target.push_back(static_cast<std::uint32_t>(std::stoul(cell)));
      ++col;
    }
    if (col != F + ds.I) throw DimensionMismatch(csv_path + ": row " + std::to_string(ds.samples.size() + 1) +
                                                 " has " + std::to_string(col) + " columns");
    ds.samples.push_back(std::move(s));
  }
  if (seeds.size() != ds.samples.size()) throw DimensionMismatch(meta_path + ": sample count differs from the CSV");
  for (std::size_t s = 0; s < seeds.size(); ++s) ds.samples[s].channel_seed = seeds[s];
  return ds;
}

}  // namespace irsa::ml
