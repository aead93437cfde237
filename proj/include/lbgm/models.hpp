// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Small differentiable models with hand-written gradients.
//
// Parameters are stored flat. Each layer contributes its weight block
// (rows = outputs, cols = inputs, row-major) followed by its bias block,
// layer by layer.

#ifndef LBGM_MODELS_HPP_
#define LBGM_MODELS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "lbgm/numerics.hpp"

namespace lbgm {

enum class ModelKind { kLinearRegression, kSoftmaxClassifier, kMlp1h };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct LayerShape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool bias = false;
  std::size_t size() const { return rows * cols; }
  bool is_matrix() const { return rows > 1 && cols > 1; }
};

/// Minibatch of samples. `labels` is used by classifiers, `targets`
/// (n x output_dim, row-major) by regression.
struct Batch {
  std::size_t n = 0;
  std::size_t input_dim = 0;
  std::vector<double> inputs;
  std::vector<int> labels;
  std::vector<double> targets;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(inputs).subspan(i * input_dim, input_dim);
  }
};

class Model {
 public:
  /// Half squared error, 0.5 * |W x + b - y|^2, averaged over the batch.
  static Model linear_regression(std::size_t input_dim, std::size_t output_dim, bool bias = true);
  static Model softmax_classifier(std::size_t input_dim, std::size_t classes);
  /// One tanh hidden layer followed by a softmax output layer.
  static Model mlp1h(std::size_t input_dim, std::size_t hidden_dim, std::size_t classes);

  ModelKind kind() const { return kind_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t param_dim() const { return param_dim_; }
  bool is_classifier() const { return kind_ != ModelKind::kLinearRegression; }

  /// Blocks partitioning [0, param_dim) in flatten order.
  const std::vector<LayerShape>& layer_shapes() const { return shapes_; }
  /// Start offset of each block in layer_shapes().
  const std::vector<std::size_t>& block_offsets() const { return offsets_; }

  /// Weights and biases drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  ParamVector init_params(RngStream& rng) const;

  /// Fraction of correctly classified samples; ties in argmax go to the
  /// lowest class index.
  double accuracy(const ParamVector& theta, const Batch& batch) const;

 private:
  Model(ModelKind kind, std::size_t in, std::size_t hidden, std::size_t out, std::vector<LayerShape> shapes);

  ModelKind kind_;
  std::size_t input_dim_;
  std::size_t hidden_dim_;
  std::size_t output_dim_;
  std::size_t param_dim_;
  std::vector<LayerShape> shapes_;
  std::vector<std::size_t> offsets_;
};

/// Mean loss over the batch: half squared error for regression,
/// cross-entropy for classifiers.
double forward_loss(const Model& model, const ParamVector& theta, const Batch& batch);

/// Gradient of forward_loss. Per-sample contributions are accumulated in
/// batch order and then divided by n.
ParamVector gradient(const Model& model, const ParamVector& theta, const Batch& batch);

/// Largest per-coordinate relative error between gradient() and central
/// finite differences with step `eps`. The denominator is
/// max(|analytic|, |numeric|, 1e-6) so that near-zero coordinates do not
/// report round-off as error.
double fd_check(const Model& model, const ParamVector& theta, const Batch& batch, double eps);

}  // namespace lbgm

#endif  // LBGM_MODELS_HPP_
