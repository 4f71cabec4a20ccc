#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "irsa/ml/dataset.hpp"
#include "irsa/ml/fnn.hpp"
#include "irsa/ml/lm.hpp"
#include "irsa/types.hpp"

namespace irsa::ml {

// Percentage of predictions that match their target matrix entirely.
double accuracy(const std::vector<AssociationMatrix>& preds, const std::vector<AssociationMatrix>& targets);

struct TrainResult {
  FnnModel model;
  LmResult lm;       // the kept restart
  int restart = 0;   // its index
  std::vector<double> restart_val_mse;
};

// Network [features, hidden..., I] fitted on the training split with early
// stopping on the validation split. Inputs are standardized with training
// statistics; code exponents are mapped onto [-1, 1]. Restart r starts from
// seed mix_seed(seed, r); the one with the lowest validation loss is returned.
TrainResult train_surrogate(const Dataset& ds, const std::vector<std::size_t>& hidden, const MlOptions& opts,
                            std::uint64_t seed);

std::vector<AssociationMatrix> predict(const FnnModel& model, const Eigen::MatrixXd& X,
                                       const std::vector<std::size_t>& quotas, bool repair);

using Predictor = std::function<std::vector<AssociationMatrix>(const Eigen::MatrixXd& X)>;

struct SurrogateReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  // Mean of (U_label - U_pred) / U_label with U the summed upper-bound rate
  // after refining beamforming and phases for each association.
  double mean_rate_gap = 0.0;
  double inference_seconds = 0.0;
};

SurrogateReport evaluate_surrogate(const Predictor& predictor, const Dataset& ds, const std::vector<std::size_t>& idx,
                                   const ValidatedScenario& scn);
SurrogateReport evaluate_surrogate(const FnnModel& model, const Dataset& ds, const std::vector<std::size_t>& idx,
                                   const ValidatedScenario& scn, bool repair);

struct BenchReport {
  std::size_t n = 0;
  double algorithm1_seconds = 0.0;
  double surrogate_seconds = 0.0;
  double speedup = 0.0;
  double algorithm1_self_accuracy = 0.0;  // association solver rerun against itself
  double algorithm1_label_accuracy = 0.0; // association solver on the features vs the labels
  double surrogate_accuracy = 0.0;        // against the dataset labels
};

// Wall-clock of the association solver on each sample's gains versus batched surrogate inference.
BenchReport bench(const FnnModel& model, const Dataset& ds, const std::vector<std::size_t>& idx,
                  const ValidatedScenario& scn, bool repair);

}  // namespace irsa::ml
