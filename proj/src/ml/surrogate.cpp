#include "irsa/ml/surrogate.hpp"

#include <chrono>
#include <cmath>

#include "irsa/alternating.hpp"
#include "irsa/association.hpp"
#include "irsa/error.hpp"
#include "irsa/ml/encoding.hpp"
#include "irsa/parallel.hpp"
#include "irsa/rng.hpp"

namespace irsa::ml {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<AssociationMatrix> labels(const Dataset& ds, const std::vector<std::size_t>& idx) {
  std::vector<AssociationMatrix> out;
  out.reserve(idx.size());
  for (auto s : idx) out.push_back(decode_codes(ds.samples[s].target, ds.K));
  return out;
}

}  // namespace

double accuracy(const std::vector<AssociationMatrix>& preds, const std::vector<AssociationMatrix>& targets) {
  if (preds.size() != targets.size())
    throw DimensionMismatch("accuracy: " + std::to_string(preds.size()) + " predictions for " +
                            std::to_string(targets.size()) + " targets");
  if (preds.empty()) throw InvalidParameter("accuracy", "no samples");
  std::size_t hit = 0;
  for (std::size_t s = 0; s < preds.size(); ++s) hit += preds[s] == targets[s];
  return 100.0 * static_cast<double>(hit) / static_cast<double>(preds.size());
}

TrainResult train_surrogate(const Dataset& ds, const std::vector<std::size_t>& hidden, const MlOptions& opts,
                            std::uint64_t seed) {
  if (opts.restarts < 1) throw InvalidParameter("restarts", "must be at least 1");
  std::vector<std::size_t> sizes{feature_count(ds.K, ds.I)};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(ds.I);
  FnnModel shell(sizes);
  shell.set_input_transform(FnnModel::InputTransform::Log);

  const MatrixXd X_raw = feature_matrix(ds, ds.train);
  const MatrixXd X = shell.transform_inputs(X_raw);
  const VectorXd mean = X.rowwise().mean();
  VectorXd scale = ((X.colwise() - mean).array().square().rowwise().sum() / static_cast<double>(X.cols())).sqrt();
  for (auto& s : scale)
    if (!(s > 0.0)) s = 1.0;
  shell.set_input_normalization(mean, scale);
  // Exponents 0..K-1 of the one-hot codes onto [-1, 1].
  shell.set_output_transform(FnnModel::OutputTransform::Log2);
  const double half = ds.K > 1 ? (static_cast<double>(ds.K) - 1.0) / 2.0 : 1.0;
  shell.set_output_scaling(VectorXd::Constant(ds.I, half), VectorXd::Constant(ds.I, half));

  LmOptions lm;
  lm.max_epochs = opts.max_epochs;
  lm.max_val_fail = opts.max_val_fail;
  lm.mu_init = opts.mu_init;
  lm.mu_max = opts.mu_max;
  const MatrixXd Zt = shell.normalize_inputs(X_raw), Tt = shell.normalize_targets(target_matrix(ds, ds.train));
  const MatrixXd Zv = shell.normalize_inputs(feature_matrix(ds, ds.val));
  const MatrixXd Tv = shell.normalize_targets(target_matrix(ds, ds.val));

  const auto n = static_cast<std::size_t>(opts.restarts);
  std::vector<LmResult> runs(n);
  parallel_for(n, [&](std::size_t r) {
    FnnModel model = shell;
    model.set_parameters(FnnModel::random(sizes, mix_seed(seed, r)).parameters());
    runs[r] = train_lm(std::move(model), Zt, Tt, Zv, Tv, lm);
  });

  TrainResult out;
  for (std::size_t r = 0; r < n; ++r) {
    out.restart_val_mse.push_back(runs[r].best_val_mse);
    if (runs[r].best_val_mse < runs[static_cast<std::size_t>(out.restart)].best_val_mse) out.restart = static_cast<int>(r);
  }
  out.lm = std::move(runs[static_cast<std::size_t>(out.restart)]);
  out.model = out.lm.model;
  return out;
}

std::vector<AssociationMatrix> predict(const FnnModel& model, const MatrixXd& X, const std::vector<std::size_t>& quotas,
                                       bool repair) {
  // For a log2 model these are exponents, rounded where the network was fitted.
  const MatrixXd Y = model.forward_unscaled(X);
  std::vector<AssociationMatrix> out;
  out.reserve(static_cast<std::size_t>(Y.cols()));
  if (model.output_transform() == FnnModel::OutputTransform::Log2) {
    for (Eigen::Index s = 0; s < Y.cols(); ++s) out.push_back(decode_exponents(Y.col(s), quotas, repair));
  } else {
    for (Eigen::Index s = 0; s < Y.cols(); ++s) out.push_back(decode_output(Y.col(s), quotas, repair));
  }
  return out;
}

SurrogateReport evaluate_surrogate(const Predictor& predictor, const Dataset& ds, const std::vector<std::size_t>& idx,
                                   const ValidatedScenario& scn) {
  SurrogateReport rep;
  rep.n = idx.size();
  const MatrixXd X = feature_matrix(ds, idx);
  const auto t0 = Clock::now();
  const auto preds = predictor(X);
  rep.inference_seconds = seconds_since(t0);
  const auto truth = labels(ds, idx);
  rep.accuracy = accuracy(preds, truth);

  std::vector<double> gap(idx.size(), 0.0);
  parallel_for(idx.size(), [&](std::size_t j) {
    if (preds[j] == truth[j]) return;
    const std::uint64_t seed = ds.samples[idx[j]].channel_seed;
    const ValidatedScenario rs = realization_scenario(scn, seed);
    const ChannelSet ch = draw_channels(rs, seed);
    const ReflectionSet start = initial_phases(ch);
    const double u_label = refine_fixed_association(ch, rs, truth[j], start).trace.back();
    const double u_pred = refine_fixed_association(ch, rs, preds[j], start).trace.back();
    gap[j] = (u_label - u_pred) / u_label;
  });
  double total = 0.0;
  for (double g : gap) total += g;
  rep.mean_rate_gap = total / static_cast<double>(idx.size());
  return rep;
}

SurrogateReport evaluate_surrogate(const FnnModel& model, const Dataset& ds, const std::vector<std::size_t>& idx,
                                   const ValidatedScenario& scn, bool repair) {
  return evaluate_surrogate([&](const MatrixXd& X) { return predict(model, X, ds.quotas, repair); }, ds, idx, scn);
}

BenchReport bench(const FnnModel& model, const Dataset& ds, const std::vector<std::size_t>& idx,
                  const ValidatedScenario& scn, bool repair) {
  BenchReport rep;
  rep.n = idx.size();
  std::vector<LinkGains> gains;
  std::vector<ValidatedScenario> scenarios;
  gains.reserve(idx.size());
  scenarios.reserve(idx.size());
  for (auto s : idx) {
    gains.push_back(gains_from_features(ds.samples[s].features, ds.K, ds.I));
    scenarios.push_back(realization_scenario(scn, ds.samples[s].channel_seed));
  }

  std::vector<AssociationMatrix> first, second;
  first.reserve(idx.size());
  auto t0 = Clock::now();
  for (std::size_t j = 0; j < idx.size(); ++j) first.push_back(solve_association(gains[j], scenarios[j]).A);
  rep.algorithm1_seconds = seconds_since(t0);
  for (std::size_t j = 0; j < idx.size(); ++j) second.push_back(solve_association(gains[j], scenarios[j]).A);
  rep.algorithm1_self_accuracy = accuracy(second, first);
  rep.algorithm1_label_accuracy = accuracy(first, labels(ds, idx));

  const MatrixXd X = feature_matrix(ds, idx);
  t0 = Clock::now();
  const auto preds = predict(model, X, ds.quotas, repair);
  rep.surrogate_seconds = seconds_since(t0);
  rep.surrogate_accuracy = accuracy(preds, labels(ds, idx));
  rep.speedup = rep.surrogate_seconds > 0.0 ? rep.algorithm1_seconds / rep.surrogate_seconds : INFINITY;
  return rep;
}

}  // namespace irsa::ml
