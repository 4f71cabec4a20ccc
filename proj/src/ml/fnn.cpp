#include "irsa/ml/fnn.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "irsa/error.hpp"
#include "irsa/io.hpp"
#include "irsa/rng.hpp"

namespace irsa::ml {

using Eigen::MatrixXd;
using Eigen::VectorXd;

FnnModel::FnnModel(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw InvalidParameter("hidden", "network needs an input and an output layer");
  for (auto s : sizes_)
    if (s == 0) throw InvalidParameter("hidden", "layer sizes must be positive");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    W_.push_back(MatrixXd::Zero(sizes_[l + 1], sizes_[l]));
    b_.push_back(VectorXd::Zero(sizes_[l + 1]));
  }
  in_mean_ = VectorXd::Zero(inputs());
  in_scale_ = VectorXd::Ones(inputs());
  out_offset_ = VectorXd::Zero(outputs());
  out_scale_ = VectorXd::Ones(outputs());
}

FnnModel FnnModel::random(std::vector<std::size_t> sizes, std::uint64_t seed) {
  FnnModel m(std::move(sizes));
  const Substream rng(seed, Stream::WeightInit);
  for (std::size_t l = 0; l < m.layers(); ++l) {
    const double r = 1.0 / std::sqrt(static_cast<double>(m.sizes_[l]));
    auto draw = [&](std::uint32_t row, std::uint32_t col) { return r * (2.0 * rng.uniform(l, row, col) - 1.0); };
    for (Eigen::Index j = 0; j < m.W_[l].rows(); ++j) {
      for (Eigen::Index c = 0; c < m.W_[l].cols(); ++c) m.W_[l](j, c) = draw(j, c);
      m.b_[l][j] = draw(j, m.W_[l].cols());
    }
  }
  return m;
}

std::size_t FnnModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layers(); ++l) n += sizes_[l + 1] * (sizes_[l] + 1);
  return n;
}

VectorXd FnnModel::parameters() const {
  VectorXd p(parameter_count());
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < layers(); ++l) {
    for (Eigen::Index j = 0; j < W_[l].rows(); ++j)
      for (Eigen::Index c = 0; c < W_[l].cols(); ++c) p[at++] = W_[l](j, c);
    p.segment(at, b_[l].size()) = b_[l];
    at += b_[l].size();
  }
  return p;
}

void FnnModel::set_parameters(const VectorXd& p) {
  if (static_cast<std::size_t>(p.size()) != parameter_count())
    throw DimensionMismatch("parameter vector has " + std::to_string(p.size()) + " entries, model needs " +
                            std::to_string(parameter_count()));
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < layers(); ++l) {
    for (Eigen::Index j = 0; j < W_[l].rows(); ++j)
      for (Eigen::Index c = 0; c < W_[l].cols(); ++c) W_[l](j, c) = p[at++];
    b_[l] = p.segment(at, b_[l].size());
    at += b_[l].size();
  }
}

void FnnModel::set_input_normalization(VectorXd mean, VectorXd scale) {
  if (mean.size() != static_cast<Eigen::Index>(inputs()) || scale.size() != mean.size())
    throw DimensionMismatch("input normalization does not match the input layer");
  in_mean_ = std::move(mean);
  in_scale_ = std::move(scale);
}

void FnnModel::set_output_scaling(VectorXd offset, VectorXd scale) {
  if (offset.size() != static_cast<Eigen::Index>(outputs()) || scale.size() != offset.size())
    throw DimensionMismatch("output scaling does not match the output layer");
  out_offset_ = std::move(offset);
  out_scale_ = std::move(scale);
}

MatrixXd FnnModel::transform_inputs(const MatrixXd& X) const {
  if (X.rows() != static_cast<Eigen::Index>(inputs()))
    throw DimensionMismatch("expected " + std::to_string(inputs()) + " features, got " + std::to_string(X.rows()));
  if (transform_ == InputTransform::Identity) return X;
  // Zero gains (a vanished channel) map to the log of the smallest normal double.
  return X.array().max(std::numeric_limits<double>::min()).log().matrix();
}

MatrixXd FnnModel::normalize_inputs(const MatrixXd& X) const {
  return (transform_inputs(X).colwise() - in_mean_).array().colwise() / in_scale_.array();
}

MatrixXd FnnModel::normalize_targets(const MatrixXd& T) const {
  MatrixXd t = T;
  if (out_transform_ == OutputTransform::Log2) {
    if ((T.array() <= 0.0).any()) throw InvalidParameter("targets", "log2 output scaling needs positive targets");
    t = T.array().log2().matrix();
  }
  return (t.colwise() - out_offset_).array().colwise() / out_scale_.array();
}

namespace {

// tanh through exp, which Eigen vectorizes for doubles; within 4e-16 of std::tanh.
MatrixXd activate(const MatrixXd& z) { return (1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0)).matrix(); }

MatrixXd unscale(const MatrixXd& Y, const VectorXd& scale, const VectorXd& offset) {
  return (Y.array().colwise() * scale.array()).matrix().colwise() + offset;
}

}  // namespace

MatrixXd FnnModel::denormalize_outputs(const MatrixXd& Y) const {
  MatrixXd y = unscale(Y, out_scale_, out_offset_);
  if (out_transform_ == OutputTransform::Log2) y = y.unaryExpr([](double v) { return std::exp2(v); });
  return y;
}

MatrixXd FnnModel::forward_normalized(const MatrixXd& Z) const {
  MatrixXd a = Z;
  for (std::size_t l = 0; l < layers(); ++l) {
    MatrixXd z = (W_[l] * a).colwise() + b_[l];
    a = (l + 1 < layers()) ? activate(z) : z;
  }
  return a;
}

MatrixXd FnnModel::forward_batch(const MatrixXd& X) const {
  return denormalize_outputs(forward_normalized(normalize_inputs(X)));
}

MatrixXd FnnModel::forward_unscaled(const MatrixXd& X) const {
  return unscale(forward_normalized(normalize_inputs(X)), out_scale_, out_offset_);
}

VectorXd FnnModel::forward(const VectorXd& x) const { return forward_batch(x); }

void FnnModel::jacobian_block(const MatrixXd& Z, MatrixXd& J, MatrixXd& Y) const {
  const Eigen::Index B = Z.cols();
  const Eigen::Index outs = static_cast<Eigen::Index>(outputs());
  std::vector<MatrixXd> act{Z};
  for (std::size_t l = 0; l < layers(); ++l) {
    MatrixXd z = (W_[l] * act.back()).colwise() + b_[l];
    act.push_back(l + 1 < layers() ? activate(z) : z);
  }
  Y = act.back();

  std::vector<Eigen::Index> offset(layers());
  Eigen::Index total = 0;
  for (std::size_t l = 0; l < layers(); ++l) {
    offset[l] = total;
    total += static_cast<Eigen::Index>(sizes_[l + 1] * (sizes_[l] + 1));
  }
  J.resize(B * outs, total);

  for (Eigen::Index o = 0; o < outs; ++o) {
    MatrixXd delta = MatrixXd::Zero(outs, B);
    delta.row(o).setOnes();
    for (std::size_t l = layers(); l-- > 0;) {
      const MatrixXd& prev = act[l];
      const Eigen::Index rows = W_[l].rows(), cols = W_[l].cols();
      for (Eigen::Index s = 0; s < B; ++s) {
        auto row = J.row(s * outs + o);
        Eigen::Index at = offset[l];
        for (Eigen::Index j = 0; j < rows; ++j) {
          const double d = delta(j, s);
          for (Eigen::Index c = 0; c < cols; ++c) row[at + c] = d * prev(c, s);
          at += cols;
        }
        row.segment(at, rows) = delta.col(s);
      }
      if (l > 0) delta = ((W_[l].transpose() * delta).array() * (1.0 - prev.array().square())).matrix();
    }
  }
}

MatrixXd FnnModel::jacobian(const VectorXd& z) const {
  MatrixXd J, Y;
  jacobian_block(z, J, Y);
  return J;
}

bool FnnModel::operator==(const FnnModel& other) const {
  if (sizes_ != other.sizes_ || transform_ != other.transform_ || out_transform_ != other.out_transform_) return false;
  return parameters() == other.parameters() && in_mean_ == other.in_mean_ && in_scale_ == other.in_scale_ &&
         out_offset_ == other.out_offset_ && out_scale_ == other.out_scale_;
}

namespace {

nlohmann::json vec_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorXd json_vec(const nlohmann::json& j, std::size_t n, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != n) throw DimensionMismatch(std::string(what) + " has the wrong length");
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json FnnModel::to_json() const {
  nlohmann::json layers_json = nlohmann::json::array();
  for (std::size_t l = 0; l < layers(); ++l) {
    std::vector<double> w;
    for (Eigen::Index j = 0; j < W_[l].rows(); ++j)
      for (Eigen::Index c = 0; c < W_[l].cols(); ++c) w.push_back(W_[l](j, c));
    layers_json.push_back({{"weights", w}, {"bias", vec_json(b_[l])}});
  }
  return {{"format_version", kFormatVersion},
          {"activation", "tanh"},
          {"input_transform", transform_ == InputTransform::Log ? "log" : "identity"},
          {"output_transform", out_transform_ == OutputTransform::Log2 ? "log2" : "linear"},
          {"sizes", sizes_},
          {"layers", layers_json},
          {"input_mean", vec_json(in_mean_)},
          {"input_scale", vec_json(in_scale_)},
          {"output_offset", vec_json(out_offset_)},
          {"output_scale", vec_json(out_scale_)}};
}

FnnModel FnnModel::from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kFormatVersion)
    throw InvalidParameter("model", "unsupported format_version");
  if (j.at("activation").get<std::string>() != "tanh") throw InvalidParameter("model", "unsupported activation");
  FnnModel m(j.at("sizes").get<std::vector<std::size_t>>());
  const auto transform = j.value("input_transform", std::string("identity"));
  if (transform == "log") m.transform_ = InputTransform::Log;
  else if (transform != "identity") throw InvalidParameter("model", "unknown input_transform '" + transform + "'");
  const auto out_transform = j.value("output_transform", std::string("linear"));
  if (out_transform == "log2") m.out_transform_ = OutputTransform::Log2;
  else if (out_transform != "linear")
    throw InvalidParameter("model", "unknown output_transform '" + out_transform + "'");
  const auto& layers_json = j.at("layers");
  if (layers_json.size() != m.layers()) throw DimensionMismatch("model layer count does not match sizes");
  for (std::size_t l = 0; l < m.layers(); ++l) {
    const auto w = layers_json[l].at("weights").get<std::vector<double>>();
    if (w.size() != m.sizes_[l] * m.sizes_[l + 1]) throw DimensionMismatch("weight array has the wrong length");
    m.W_[l] = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        w.data(), static_cast<Eigen::Index>(m.sizes_[l + 1]), static_cast<Eigen::Index>(m.sizes_[l]));
    m.b_[l] = json_vec(layers_json[l].at("bias"), m.sizes_[l + 1], "bias");
  }
  m.in_mean_ = json_vec(j.at("input_mean"), m.inputs(), "input_mean");
  m.in_scale_ = json_vec(j.at("input_scale"), m.inputs(), "input_scale");
  m.out_offset_ = json_vec(j.at("output_offset"), m.outputs(), "output_offset");
  m.out_scale_ = json_vec(j.at("output_scale"), m.outputs(), "output_scale");
  return m;
}

void FnnModel::save(const std::string& path) const { write_file_atomic(path, to_json().dump() + "\n"); }

FnnModel FnnModel::load(const std::string& path) { return from_json(nlohmann::json::parse(read_file(path))); }

}  // namespace irsa::ml
