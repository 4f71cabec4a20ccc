#include "irsa/ml/lm.hpp"

#include <limits>
#include <sstream>

#include "irsa/error.hpp"

namespace irsa::ml {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double mse(const FnnModel& m, const MatrixXd& Z, const MatrixXd& T) {
  if (Z.cols() == 0) return 0.0;
  return (m.forward_normalized(Z) - T).squaredNorm() / static_cast<double>(T.size());
}

const char* stop_name(LmStop s) {
  switch (s) {
    case LmStop::MaxEpochs: return "max_epochs";
    case LmStop::MuOverflow: return "mu_overflow";
    case LmStop::ValidationFailures: return "validation_failures";
    case LmStop::Converged: return "converged";
  }
  return "unknown";
}

namespace {

// Accumulates J^T J (lower triangle) and J^T e, e = target - output.
void normal_equations(const FnnModel& m, const MatrixXd& Z, const MatrixXd& T, Eigen::Index block, MatrixXd& JtJ,
                      VectorXd& Jte) {
  const auto P = static_cast<Eigen::Index>(m.parameter_count());
  JtJ.setZero(P, P);
  Jte.setZero(P);
  MatrixXd J, Y;
  for (Eigen::Index start = 0; start < Z.cols(); start += block) {
    const Eigen::Index n = std::min(block, Z.cols() - start);
    m.jacobian_block(Z.middleCols(start, n), J, Y);
    const MatrixXd E = T.middleCols(start, n) - Y;
    JtJ.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose());
    Jte.noalias() += J.transpose() * Eigen::Map<const VectorXd>(E.data(), E.size());
  }
}

}  // namespace

LmResult train_lm(FnnModel model, const MatrixXd& Z_train, const MatrixXd& T_train, const MatrixXd& Z_val,
                  const MatrixXd& T_val, const LmOptions& opts) {
  if (Z_train.cols() == 0) throw InvalidParameter("train", "training set is empty");
  if (Z_train.cols() != T_train.cols() || Z_val.cols() != T_val.cols())
    throw DimensionMismatch("feature and target sample counts differ");
  if (T_train.rows() != static_cast<Eigen::Index>(model.outputs()))
    throw DimensionMismatch("target rows do not match the output layer");

  const bool use_val = Z_val.cols() > 0;
  LmResult out{model, {}, LmStop::MaxEpochs, 0.0};
  double train = mse(model, Z_train, T_train);
  double val = use_val ? mse(model, Z_val, T_val) : train;
  double mu = opts.mu_init;
  out.best_val_mse = val;
  out.history.push_back({0, train, val, mu});

  VectorXd w = model.parameters();
  MatrixXd JtJ;
  VectorXd Jte;
  int val_fail = 0;
  for (int epoch = 1; epoch <= opts.max_epochs; ++epoch) {
    normal_equations(model, Z_train, T_train, opts.block, JtJ, Jte);
    if (Jte.lpNorm<Eigen::Infinity>() == 0.0) {
      out.stop = LmStop::Converged;
      break;
    }

    bool accepted = false;
    while (!accepted) {
      MatrixXd H = JtJ;
      H.diagonal().array() += mu;
      Eigen::LLT<MatrixXd, Eigen::Lower> llt(H);
      if (llt.info() == Eigen::Success) {
        const VectorXd trial = w + llt.solve(Jte);
        model.set_parameters(trial);
        const double t = mse(model, Z_train, T_train);
        if (std::isfinite(t) && t < train) {
          w = trial;
          train = t;
          accepted = true;
          mu = std::max(mu * opts.mu_decrease, std::numeric_limits<double>::min());
          break;
        }
      } else if (mu >= opts.mu_max) {
        std::ostringstream msg;
        msg << "normal equations singular at mu=" << mu << " (epoch " << epoch << ", " << w.size() << " parameters)";
        throw NumericalFailure(msg.str());
      }
      mu *= opts.mu_increase;
      if (mu > opts.mu_max) break;
    }
    model.set_parameters(w);
    if (!accepted) {
      out.stop = LmStop::MuOverflow;
      break;
    }

    val = use_val ? mse(model, Z_val, T_val) : train;
    out.history.push_back({epoch, train, val, mu});
    if (!use_val || val < out.best_val_mse) {
      out.best_val_mse = val;
      out.model = model;
      val_fail = 0;
    } else if (++val_fail >= opts.max_val_fail) {
      out.stop = LmStop::ValidationFailures;
      break;
    }
  }
  return out;
}

}  // namespace irsa::ml
