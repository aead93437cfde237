// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LBGM_EXPERIMENT_HPP_
#define LBGM_EXPERIMENT_HPP_

#include <cstddef>

#include "lbgm/config.hpp"
#include "lbgm/data.hpp"
#include "lbgm/models.hpp"
#include "lbgm/numerics.hpp"

namespace lbgm {

struct RoundConfig {
  double eta = 0.05;
  std::size_t tau = 1;
  std::size_t batch_size = 32;
};

void validate(const RoundConfig& cfg);

/// A config resolved into concrete data, model, partition and initial
/// parameters. Everything here is derived deterministically from the seed.
struct Experiment {
  ExperimentConfig config;
  Model model;
  Dataset train;
  Dataset test;
  Partition partition;
  ParamVector theta0;
  RoundConfig round;
};

/// Builds the model matching the dataset shape and the config's model spec.
Model make_model(const ModelSpec& spec, const Dataset& train);

Experiment make_experiment(const ExperimentConfig& cfg);

/// Same as make_experiment but with caller-supplied data; the partition and
/// initial parameters are still drawn from the config seed.
Experiment make_experiment(const ExperimentConfig& cfg, Dataset train, Dataset test);

}  // namespace lbgm

#endif  // LBGM_EXPERIMENT_HPP_
