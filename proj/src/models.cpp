// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lbgm {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinearRegression:
      return "linear_regression";
    case ModelKind::kSoftmaxClassifier:
      return "softmax_classifier";
    case ModelKind::kMlp1h:
      return "mlp1h";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "linear_regression") return ModelKind::kLinearRegression;
  if (name == "softmax_classifier") return ModelKind::kSoftmaxClassifier;
  if (name == "mlp1h") return ModelKind::kMlp1h;
  throw std::invalid_argument("unknown model kind '" + name + "'");
}

Model::Model(ModelKind kind, std::size_t in, std::size_t hidden, std::size_t out, std::vector<LayerShape> shapes)
    : kind_(kind), input_dim_(in), hidden_dim_(hidden), output_dim_(out), param_dim_(0), shapes_(std::move(shapes)) {
  if (in == 0 || out == 0) {
    throw std::invalid_argument("Model: input and output dimensions must be positive");
  }
  for (const auto& s : shapes_) {
    offsets_.push_back(param_dim_);
    param_dim_ += s.size();
  }
}

Model Model::linear_regression(std::size_t input_dim, std::size_t output_dim, bool bias) {
  std::vector<LayerShape> shapes{{output_dim, input_dim}};
  if (bias) shapes.push_back({output_dim, 1, true});
  return Model(ModelKind::kLinearRegression, input_dim, 0, output_dim, std::move(shapes));
}

Model Model::softmax_classifier(std::size_t input_dim, std::size_t classes) {
  if (classes < 2) throw std::invalid_argument("softmax_classifier: need at least 2 classes");
  return Model(ModelKind::kSoftmaxClassifier, input_dim, 0, classes, {{classes, input_dim}, {classes, 1, true}});
}

Model Model::mlp1h(std::size_t input_dim, std::size_t hidden_dim, std::size_t classes) {
  if (classes < 2) throw std::invalid_argument("mlp1h: need at least 2 classes");
  if (hidden_dim == 0) throw std::invalid_argument("mlp1h: hidden_dim must be positive");
  return Model(ModelKind::kMlp1h, input_dim, hidden_dim, classes,
               {{hidden_dim, input_dim}, {hidden_dim, 1, true}, {classes, hidden_dim}, {classes, 1, true}});
}

ParamVector Model::init_params(RngStream& rng) const {
  std::vector<double> theta;
  theta.reserve(param_dim_);
  // A bias block shares the fan-in of the weight block before it.
  std::size_t fan_in = 1;
  for (const auto& s : shapes_) {
    if (!s.bias) fan_in = s.cols;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < s.size(); ++i) theta.push_back(rng.uniform(-bound, bound));
  }
  return ParamVector(std::move(theta));
}

namespace {

void check_inputs(const Model& model, const ParamVector& theta, const Batch& batch) {
  if (theta.dim() != model.param_dim()) {
    throw std::invalid_argument("model: theta has dimension " + std::to_string(theta.dim()) + ", expected " +
                                std::to_string(model.param_dim()));
  }
  if (batch.n == 0) throw std::invalid_argument("model: empty batch");
  if (batch.input_dim != model.input_dim() || batch.inputs.size() != batch.n * batch.input_dim) {
    throw std::invalid_argument("model: batch input shape mismatch");
  }
  if (model.is_classifier()) {
    if (batch.labels.size() != batch.n) throw std::invalid_argument("model: batch label count mismatch");
    for (int y : batch.labels) {
      if (y < 0 || static_cast<std::size_t>(y) >= model.output_dim()) {
        throw std::invalid_argument("model: class label " + std::to_string(y) + " out of range");
      }
    }
  } else if (batch.targets.size() != batch.n * model.output_dim()) {
    throw std::invalid_argument("model: batch target shape mismatch");
  }
}

// out = W x + b for a row-major (rows x cols) block starting at w.
void affine(const double* w, const double* b, std::span<const double> x, std::size_t rows, std::vector<double>& out) {
  const std::size_t cols = x.size();
  out.assign(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* wr = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    out[r] = b ? acc + b[r] : acc;
  }
}

// Turns logits into probabilities in place and returns -log p[label].
double softmax_xent(std::vector<double>& logits, int label) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    z += v;
  }
  const double log_p = std::log(logits[label] / z);
  for (double& v : logits) v /= z;
  return -log_p;
}

// Per-sample forward/backward. When grad is non-null the sample gradient is
// added into it. Returns the sample loss.
class SampleEvaluator {
 public:
  SampleEvaluator(const Model& model, const ParamVector& theta) : model_(model), theta_(theta.raw()) {}

  double run(const Batch& batch, std::size_t i, std::vector<double>* grad) {
    switch (model_.kind()) {
      case ModelKind::kLinearRegression:
        return linear(batch, i, grad);
      case ModelKind::kSoftmaxClassifier:
        return softmax(batch, i, grad);
      case ModelKind::kMlp1h:
        return mlp(batch, i, grad);
    }
    return 0.0;
  }

  std::size_t predict(const Batch& batch, std::size_t i) {
    if (model_.kind() == ModelKind::kMlp1h) {
      mlp_forward(batch.row(i));
    } else {
      const auto& off = model_.block_offsets();
      affine(&theta_[off[0]], &theta_[off[1]], batch.row(i), model_.output_dim(), out_);
    }
    return static_cast<std::size_t>(std::max_element(out_.begin(), out_.end()) - out_.begin());
  }

 private:
  double linear(const Batch& batch, std::size_t i, std::vector<double>* grad) {
    const auto& off = model_.block_offsets();
    const bool has_bias = off.size() > 1;
    const auto x = batch.row(i);
    const std::size_t out_dim = model_.output_dim();
    affine(&theta_[off[0]], has_bias ? &theta_[off[1]] : nullptr, x, out_dim, out_);
    double loss = 0.0;
    for (std::size_t r = 0; r < out_dim; ++r) {
      out_[r] -= batch.targets[i * out_dim + r];
      loss += 0.5 * out_[r] * out_[r];
    }
    if (grad) {
      double* gw = grad->data() + off[0];
      for (std::size_t r = 0; r < out_dim; ++r) {
        for (std::size_t c = 0; c < x.size(); ++c) gw[r * x.size() + c] += out_[r] * x[c];
      }
      if (has_bias) {
        double* gb = grad->data() + off[1];
        for (std::size_t r = 0; r < out_dim; ++r) gb[r] += out_[r];
      }
    }
    return loss;
  }

  double softmax(const Batch& batch, std::size_t i, std::vector<double>* grad) {
    const auto& off = model_.block_offsets();
    const auto x = batch.row(i);
    const std::size_t classes = model_.output_dim();
    affine(&theta_[off[0]], &theta_[off[1]], x, classes, out_);
    const int y = batch.labels[i];
    const double loss = softmax_xent(out_, y);
    if (grad) {
      out_[y] -= 1.0;
      double* gw = grad->data() + off[0];
      double* gb = grad->data() + off[1];
      for (std::size_t r = 0; r < classes; ++r) {
        for (std::size_t c = 0; c < x.size(); ++c) gw[r * x.size() + c] += out_[r] * x[c];
        gb[r] += out_[r];
      }
    }
    return loss;
  }

  void mlp_forward(std::span<const double> x) {
    const auto& off = model_.block_offsets();
    affine(&theta_[off[0]], &theta_[off[1]], x, model_.hidden_dim(), hidden_);
    for (double& h : hidden_) h = std::tanh(h);
    affine(&theta_[off[2]], &theta_[off[3]], hidden_, model_.output_dim(), out_);
  }

  double mlp(const Batch& batch, std::size_t i, std::vector<double>* grad) {
    const auto& off = model_.block_offsets();
    const auto x = batch.row(i);
    const std::size_t hidden = model_.hidden_dim();
    const std::size_t classes = model_.output_dim();
    mlp_forward(x);
    const int y = batch.labels[i];
    const double loss = softmax_xent(out_, y);
    if (!grad) return loss;

    out_[y] -= 1.0;  // dL/dlogits
    double* g = grad->data();
    const double* w2 = &theta_[off[2]];
    delta_.assign(hidden, 0.0);
    for (std::size_t r = 0; r < classes; ++r) {
      for (std::size_t h = 0; h < hidden; ++h) {
        g[off[2] + r * hidden + h] += out_[r] * hidden_[h];
        delta_[h] += w2[r * hidden + h] * out_[r];
      }
      g[off[3] + r] += out_[r];
    }
    for (std::size_t h = 0; h < hidden; ++h) {
      const double dz = delta_[h] * (1.0 - hidden_[h] * hidden_[h]);
      for (std::size_t c = 0; c < x.size(); ++c) g[off[0] + h * x.size() + c] += dz * x[c];
      g[off[1] + h] += dz;
    }
    return loss;
  }

  const Model& model_;
  const std::vector<double>& theta_;
  std::vector<double> hidden_;
  std::vector<double> out_;
  std::vector<double> delta_;
};

}  // namespace

double forward_loss(const Model& model, const ParamVector& theta, const Batch& batch) {
  check_inputs(model, theta, batch);
  SampleEvaluator eval(model, theta);
  double total = 0.0;
  for (std::size_t i = 0; i < batch.n; ++i) total += eval.run(batch, i, nullptr);
  return total / static_cast<double>(batch.n);
}

ParamVector gradient(const Model& model, const ParamVector& theta, const Batch& batch) {
  check_inputs(model, theta, batch);
  SampleEvaluator eval(model, theta);
  std::vector<double> grad(model.param_dim(), 0.0);
  for (std::size_t i = 0; i < batch.n; ++i) eval.run(batch, i, &grad);
  const double n = static_cast<double>(batch.n);
  for (double& g : grad) g /= n;
  return ParamVector(std::move(grad));
}

double Model::accuracy(const ParamVector& theta, const Batch& batch) const {
  check_inputs(*this, theta, batch);
  if (!is_classifier()) throw std::logic_error("accuracy: model is not a classifier");
  SampleEvaluator eval(*this, theta);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < batch.n; ++i) {
    if (eval.predict(batch, i) == static_cast<std::size_t>(batch.labels[i])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.n);
}

double fd_check(const Model& model, const ParamVector& theta, const Batch& batch, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("fd_check: eps must be positive");
  const ParamVector analytic = gradient(model, theta, batch);
  ParamVector probe = theta;
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.dim(); ++i) {
    probe[i] = theta[i] + eps;
    const double up = forward_loss(model, probe, batch);
    probe[i] = theta[i] - eps;
    const double down = forward_loss(model, probe, batch);
    probe[i] = theta[i];
    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace lbgm
