#pragma once

#include <vector>

#include <Eigen/Dense>

#include "irsa/ml/fnn.hpp"

namespace irsa::ml {

struct LmOptions {
  int max_epochs = 200;
  int max_val_fail = 6;
  double mu_init = 1e-3;
  double mu_decrease = 0.1;
  double mu_increase = 10.0;
  double mu_max = 1e10;
  // Samples per Jacobian block; bounds memory, does not change the result.
  Eigen::Index block = 256;
};

struct LmEpoch {
  int epoch;
  double train_mse, val_mse, mu;
};

enum class LmStop { MaxEpochs, MuOverflow, ValidationFailures, Converged };

struct LmResult {
  FnnModel model;  // weights with the best validation loss seen
  std::vector<LmEpoch> history;  // entry 0 is the initial model
  LmStop stop = LmStop::MaxEpochs;
  double best_val_mse = 0.0;
};

// Mean squared error over all outputs, in normalized target units.
double mse(const FnnModel& m, const Eigen::MatrixXd& Z, const Eigen::MatrixXd& T);

// Levenberg-Marquardt on normalized inputs Z and targets T (one sample per
// column). Normalization statistics inside `model` are carried through
// unchanged. An empty validation set disables early stopping and the
// returned weights are those of the last accepted step.
LmResult train_lm(FnnModel model, const Eigen::MatrixXd& Z_train, const Eigen::MatrixXd& T_train,
                  const Eigen::MatrixXd& Z_val, const Eigen::MatrixXd& T_val, const LmOptions& opts);

const char* stop_name(LmStop s);

}  // namespace irsa::ml
