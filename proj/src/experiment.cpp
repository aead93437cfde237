// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lbgm {

void validate(const RoundConfig& cfg) {
  if (!(cfg.eta > 0.0) || !std::isfinite(cfg.eta)) throw std::invalid_argument("RoundConfig: eta must be positive");
  if (cfg.tau < 1) throw std::invalid_argument("RoundConfig: tau must be at least 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("RoundConfig: batch_size must be at least 1");
}

Model make_model(const ModelSpec& spec, const Dataset& train) {
  switch (spec.kind) {
    case ModelKind::kLinearRegression:
      return Model::linear_regression(train.dim, train.target_dim);
    case ModelKind::kSoftmaxClassifier:
      return Model::softmax_classifier(train.dim, train.num_classes);
    case ModelKind::kMlp1h:
      return Model::mlp1h(train.dim, spec.hidden, train.num_classes);
  }
  throw std::logic_error("make_model: unhandled model kind");
}

namespace {

std::pair<Dataset, Dataset> load_data(const ExperimentConfig& cfg) {
  const DataSpec& d = cfg.data;
  RngStream rng(cfg.train.seed, stream_tag::kData);
  switch (d.source) {
    case DataSource::kSynthetic: {
      // One draw so that train and test share the class centres.
      const Dataset all = synth_classification(d.n_train + d.n_test, d.dim, d.classes, d.separation, rng);
      return {all.slice(0, d.n_train), all.slice(d.n_train, d.n_test)};
    }
    case DataSource::kSyntheticRegression: {
      const Dataset all = synth_regression(d.n_train + d.n_test, d.dim, d.target_dim, d.noise, rng);
      return {all.slice(0, d.n_train), all.slice(d.n_train, d.n_test)};
    }
    case DataSource::kIdx: {
      Dataset train = load_idx(d.train_images, d.train_labels);
      Dataset test = load_idx(d.test_images, d.test_labels);
      if (d.max_train > 0 && d.max_train < train.n) train = train.slice(0, d.max_train);
      if (d.max_test > 0 && d.max_test < test.n) test = test.slice(0, d.max_test);
      test.num_classes = train.num_classes = std::max(train.num_classes, test.num_classes);
      return {std::move(train), std::move(test)};
    }
  }
  throw std::logic_error("load_data: unhandled source");
}

}  // namespace

Experiment make_experiment(const ExperimentConfig& cfg, Dataset train, Dataset test) {
  Model model = make_model(cfg.model, train);
  RngStream part_rng(cfg.train.seed, stream_tag::kPartition);
  Partition part = partition(train, cfg.data.workers, cfg.data.partition, cfg.data.shard_labels, part_rng);
  RngStream init_rng(cfg.train.seed, stream_tag::kInit);
  ParamVector theta0 = model.init_params(init_rng);

  RoundConfig round;
  round.batch_size = cfg.train.batch_size;
  round.tau = cfg.train.tau;
  if (round.tau == 0) {
    std::size_t largest = 0;
    for (const auto& shard : part.shards) largest = std::max(largest, shard.size());
    round.tau = std::max<std::size_t>(1, (largest + round.batch_size - 1) / round.batch_size);
  }
  round.eta = cfg.train.eta;
  if (cfg.train.eta_rule == EtaRule::kInvSqrtTauT) {
    const double horizon = static_cast<double>(round.tau) * static_cast<double>(std::max<std::size_t>(1, cfg.train.rounds));
    round.eta = 1.0 / std::sqrt(horizon);
  }
  validate(round);

  return Experiment{cfg, std::move(model), std::move(train), std::move(test), std::move(part), std::move(theta0), round};
}

Experiment make_experiment(const ExperimentConfig& cfg) {
  auto [train, test] = load_data(cfg);
  return make_experiment(cfg, std::move(train), std::move(test));
}

}  // namespace lbgm
