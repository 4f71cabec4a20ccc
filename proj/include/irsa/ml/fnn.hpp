#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace irsa::ml {

// Fully connected network: tanh hidden layers, linear output. Inputs are
// standardized with frozen statistics and outputs mapped back through an
// affine scale, so the network itself works in normalized units.
class FnnModel {
 public:
  static constexpr int kFormatVersion = 1;

  // Applied to raw features before standardization. Log makes gain ratios,
  // which decide associations, differences.
  enum class InputTransform { Identity, Log };
  // Log2 trains on the exponent of each target, so one-hot codes are evenly spaced.
  enum class OutputTransform { Linear, Log2 };

  FnnModel() = default;
  // sizes = [in, hidden..., out]; weights zero, normalization identity.
  explicit FnnModel(std::vector<std::size_t> sizes);

  // Uniform weights in +-1/sqrt(fan_in).
  static FnnModel random(std::vector<std::size_t> sizes, std::uint64_t seed);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t inputs() const { return sizes_.front(); }
  std::size_t outputs() const { return sizes_.back(); }
  std::size_t layers() const { return sizes_.size() - 1; }
  std::size_t parameter_count() const;

  Eigen::MatrixXd& weight(std::size_t l) { return W_[l]; }
  const Eigen::MatrixXd& weight(std::size_t l) const { return W_[l]; }
  Eigen::VectorXd& bias(std::size_t l) { return b_[l]; }
  const Eigen::VectorXd& bias(std::size_t l) const { return b_[l]; }

  // Flattened as, per layer, W row-major then b.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& p);

  void set_input_transform(InputTransform t) { transform_ = t; }
  InputTransform input_transform() const { return transform_; }
  void set_output_transform(OutputTransform t) { out_transform_ = t; }
  OutputTransform output_transform() const { return out_transform_; }
  // Raw features after the input transform, before standardization.
  Eigen::MatrixXd transform_inputs(const Eigen::MatrixXd& X) const;

  void set_input_normalization(Eigen::VectorXd mean, Eigen::VectorXd scale);
  void set_output_scaling(Eigen::VectorXd offset, Eigen::VectorXd scale);
  const Eigen::VectorXd& input_mean() const { return in_mean_; }
  const Eigen::VectorXd& input_scale() const { return in_scale_; }

  // Raw features (columns are samples) to normalized inputs and back for targets.
  Eigen::MatrixXd normalize_inputs(const Eigen::MatrixXd& X) const;
  Eigen::MatrixXd normalize_targets(const Eigen::MatrixXd& T) const;
  Eigen::MatrixXd denormalize_outputs(const Eigen::MatrixXd& Y) const;

  // Network on normalized inputs, one sample per column.
  Eigen::MatrixXd forward_normalized(const Eigen::MatrixXd& Z) const;

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& X) const;
  // Outputs with the scaling undone but the output transform not inverted:
  // exponents for a log2 model, the same as forward_batch for a linear one.
  Eigen::MatrixXd forward_unscaled(const Eigen::MatrixXd& X) const;

  // d(normalized output) / d(parameters) for one normalized input; outputs x parameters.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const;

  // Jacobian rows for a block of normalized inputs, sample-major
  // (row s * outputs + o). Also returns the outputs.
  void jacobian_block(const Eigen::MatrixXd& Z, Eigen::MatrixXd& J, Eigen::MatrixXd& Y) const;

  nlohmann::json to_json() const;
  static FnnModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static FnnModel load(const std::string& path);

  bool operator==(const FnnModel& other) const;

 private:
  std::vector<std::size_t> sizes_;
  InputTransform transform_ = InputTransform::Identity;
  OutputTransform out_transform_ = OutputTransform::Linear;
  std::vector<Eigen::MatrixXd> W_;
  std::vector<Eigen::VectorXd> b_;
  Eigen::VectorXd in_mean_, in_scale_;
  Eigen::VectorXd out_offset_, out_scale_;
};

}  // namespace irsa::ml
