#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "irsa/channel.hpp"
#include "irsa/rates.hpp"
#include "irsa/scenario.hpp"

namespace irsa::ml {

struct Sample {
  Eigen::VectorXd features;            // beta_d[k], then beta_r[i][k] row-major
  std::vector<std::uint32_t> target;   // per-tile codes
  std::uint64_t channel_seed = 0;      // regenerates the channels
};

struct Dataset {
  std::size_t K = 0, I = 0;
  std::uint64_t seed = 0;
  std::string fingerprint;
  std::vector<std::size_t> quotas;
  std::vector<Sample> samples;
  std::vector<std::size_t> train, val, test;
  std::size_t redraws = 0;  // channel draws discarded after a solver failure
};

std::size_t feature_count(std::size_t users, std::size_t tiles);

// Gains of every (tile, user) pair as if the tile served that user alone:
// the beamformer and the tile's phases are alternated a few rounds toward the
// pair's composite channel. The direct gains use plain direct MRT.
LinkGains pair_gains(const ChannelSet& ch, double pt_watts);

Eigen::VectorXd features_from_gains(const LinkGains& g);
LinkGains gains_from_features(const Eigen::VectorXd& f, std::size_t users, std::size_t tiles);

// Label of one channel draw: the codes of the association the alternating optimizer settles on.
std::vector<std::uint32_t> label_channels(const ChannelSet& ch, const ValidatedScenario& scn);

std::string scenario_fingerprint(const ValidatedScenario& scn);

// Shuffled split: the first round(S * train) indices train, the next round(S * val) validate.
void split_indices(std::size_t S, std::uint64_t seed, double train_fraction, double val_fraction,
                   std::vector<std::size_t>& train, std::vector<std::size_t>& val, std::vector<std::size_t>& test);

Dataset generate_dataset(const ValidatedScenario& scn, std::size_t S, std::uint64_t seed);

Eigen::MatrixXd feature_matrix(const Dataset& ds, const std::vector<std::size_t>& idx);
Eigen::MatrixXd target_matrix(const Dataset& ds, const std::vector<std::size_t>& idx);

std::string dataset_csv(const Dataset& ds);
nlohmann::json dataset_metadata(const Dataset& ds);
Dataset load_dataset(const std::string& csv_path, const std::string& meta_path);

}  // namespace irsa::ml
