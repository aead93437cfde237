// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the test binaries.

#ifndef LBGM_TESTS_TEST_SUPPORT_HPP_
#define LBGM_TESTS_TEST_SUPPORT_HPP_

#include "lbgm/experiment.hpp"
#include "lbgm/numerics.hpp"

namespace lbgm::testing {

/// A small synthetic 10-class mlp1h run that finishes in well under a second.
inline ExperimentConfig small_config(Algorithm algorithm = Algorithm::kVanilla) {
  ExperimentConfig cfg;
  cfg.algorithm = algorithm;
  cfg.model.hidden = 8;
  cfg.data.n_train = 400;
  cfg.data.n_test = 200;
  cfg.data.dim = 10;
  cfg.data.workers = 4;
  cfg.train.rounds = 10;
  cfg.train.batch_size = 16;
  return cfg;
}

/// One sample x = 1, y = 0 under a bias-free 1-D linear model, so the loss
/// is f(theta) = theta^2 / 2 and the gradient is theta.
inline Experiment quadratic_experiment(double theta0, double eta, std::size_t tau) {
  ExperimentConfig cfg;
  cfg.model.kind = ModelKind::kLinearRegression;
  cfg.data.workers = 1;
  cfg.train.batch_size = 1;
  cfg.train.tau = tau;
  cfg.train.eta = eta;
  Dataset ds;
  ds.n = 1;
  ds.dim = 1;
  ds.target_dim = 1;
  ds.inputs = {1.0};
  ds.targets = {0.0};
  Experiment exp = make_experiment(cfg, ds, ds);
  exp.model = Model::linear_regression(1, 1, false);
  exp.theta0 = ParamVector{theta0};
  return exp;
}

inline ParamVector random_vector(RngStream& rng, std::size_t dim, double sd = 1.0) {
  ParamVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = rng.normal(0.0, sd);
  return v;
}

}  // namespace lbgm::testing

#endif  // LBGM_TESTS_TEST_SUPPORT_HPP_
