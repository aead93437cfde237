// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "lbgm/lbgm.hpp"
#include "lbgm/simulation.hpp"
#include "test_support.hpp"

using namespace lbgm;
using lbgm::testing::random_vector;
using lbgm::testing::small_config;

TEST(LbpError, Examples) {
  const ParamVector lbg{1, 2, 3};
  EXPECT_EQ(lbp_error(scale(3, lbg), lbg), 0.0);
  EXPECT_EQ(lbp_error({0, 5}, {2, 0}), 1.0);
  EXPECT_DOUBLE_EQ(lbp_error({1, 2}, {1, 0}), 0.8);
}

TEST(LbpError, ZeroEdgeCases) {
  EXPECT_EQ(lbp_error({0, 0}, {1, 2}), 0.0);
  EXPECT_EQ(lbp_error({1, 2}, {0, 0}), 1.0);
  EXPECT_EQ(lbp_error({0, 0}, {0, 0}), 0.0);
  EXPECT_THROW(lbp_error({1}, {1, 2}), std::invalid_argument);
}

TEST(Lbc, Examples) {
  const ParamVector lbg{0.5, -2, 4};
  EXPECT_EQ(lbc(lbg, lbg), 1.0);
  EXPECT_EQ(lbc(scale(2, lbg), lbg), 2.0);
  EXPECT_EQ(lbc({1, 2}, {1, 0}), 1.0);
  EXPECT_THROW(lbc({1, 2}, {0, 0}), std::domain_error);
}

TEST(Lbc, NormConditionHolds) {
  RngStream rng(1, 0);
  for (int i = 0; i < 100; ++i) {
    const ParamVector g = random_vector(rng, 12);
    const ParamVector lbg = random_vector(rng, 12);
    const double rho = lbc(g, lbg);
    EXPECT_NEAR(norm(scale(rho, lbg)), norm(g) * std::abs(cosine_sim(g, lbg)), 1e-12 * norm(g));
  }
}

TEST(DecideMessage, FirstRoundSendsFullAndInitialisesLbg) {
  std::optional<ParamVector> lbg;
  const ParamVector g{1, 2, 3, 4};
  const UplinkMessage msg = decide_message(g, lbg, {});
  EXPECT_EQ(msg.kind(), MessageKind::kFullGradient);
  EXPECT_EQ(msg.cost_floats(), 4.0);
  ASSERT_TRUE(lbg);
  EXPECT_TRUE(bit_equal(*lbg, g));
}

TEST(DecideMessage, DeltaOneAlwaysScalarOnceInitialised) {
  RngStream rng(2, 0);
  std::optional<ParamVector> lbg = random_vector(rng, 6);
  const ParamVector stored = *lbg;
  for (int i = 0; i < 50; ++i) {
    const ParamVector g = random_vector(rng, 6);
    const UplinkMessage msg = decide_message(g, lbg, {1.0, true});
    EXPECT_TRUE(msg.is_scalar());
    EXPECT_EQ(msg.cost_floats(), 1.0);
    EXPECT_EQ(msg.cost_bits(), 32u);
    EXPECT_EQ(msg.rho(), lbc(g, stored));
  }
  EXPECT_TRUE(bit_equal(*lbg, stored));
}

TEST(DecideMessage, DeltaZeroNonCollinearSendsFull) {
  std::optional<ParamVector> lbg = ParamVector{1, 0};
  const ParamVector g{1, 1e-3};
  const UplinkMessage msg = decide_message(g, lbg, {0.0, true});
  EXPECT_EQ(msg.kind(), MessageKind::kFullGradient);
  EXPECT_TRUE(bit_equal(*lbg, g));
}

TEST(DecideMessage, ScalarCarriesApproximationError) {
  std::optional<ParamVector> lbg = ParamVector{1, 0};
  const ParamVector g{3, 1};
  const UplinkMessage msg = decide_message(g, lbg, {0.5, true});
  ASSERT_TRUE(msg.is_scalar());
  EXPECT_EQ(msg.rho(), 3.0);
  // ||g - rho lbg||^2 = 1.
  EXPECT_NEAR(msg.approx_error_sq(), 1.0, 1e-12);
}

TEST(DecideMessage, ZeroGradientSendsZeroScalar) {
  std::optional<ParamVector> lbg = ParamVector{1, 2};
  const UplinkMessage msg = decide_message(ParamVector(2), lbg, {0.0, true});
  ASSERT_TRUE(msg.is_scalar());
  EXPECT_EQ(msg.rho(), 0.0);
}

TEST(DecideMessage, ZeroLbgForcesFull) {
  std::optional<ParamVector> lbg = ParamVector(2);
  const UplinkMessage msg = decide_message({1, 2}, lbg, {1.0, true});
  EXPECT_EQ(msg.kind(), MessageKind::kFullGradient);
}

TEST(LbgmConfig, DeltaRangeValidated) {
  EXPECT_THROW(validate(LbgmConfig{1.5, true}), std::invalid_argument);
  EXPECT_THROW(validate(LbgmConfig{-0.1, true}), std::invalid_argument);
  EXPECT_NO_THROW(validate(LbgmConfig{0.0, false}));
}

TEST(Reconstruct, Examples) {
  ServerState server(ParamVector(2));
  server.lbg_copies.emplace(3, ParamVector{2, 4});
  EXPECT_TRUE(reconstruct(server, 3, UplinkMessage::scalar(0.0)).is_zero());
  EXPECT_EQ(reconstruct(server, 3, UplinkMessage::scalar(0.5)), ParamVector({1, 2}));
  EXPECT_EQ(server.lbg_copies.at(3), ParamVector({2, 4}));

  const ParamVector g{-1, 7};
  EXPECT_TRUE(bit_equal(reconstruct(server, 3, UplinkMessage::full(g)), g));
  EXPECT_TRUE(bit_equal(server.lbg_copies.at(3), g));
}

TEST(Reconstruct, ScalarWithoutServerCopyThrows) {
  ServerState server(ParamVector(2));
  EXPECT_THROW(reconstruct(server, 0, UplinkMessage::scalar(1.0)), std::logic_error);
}

class ProjectionProperty : public ::testing::TestWithParam<std::size_t> {};

TEST_P(ProjectionProperty, PythagorasAndOrthogonality) {
  const std::size_t dim = GetParam();
  RngStream rng(dim, 0);
  for (int i = 0; i < 100; ++i) {
    const ParamVector g = random_vector(rng, dim, std::pow(10.0, rng.uniform(-3, 3)));
    const ParamVector lbg = random_vector(rng, dim, std::pow(10.0, rng.uniform(-3, 3)));
    const double rho = lbc(g, lbg);
    const ParamVector resid = axpy(-rho, lbg, g);
    EXPECT_NEAR(norm_sq(resid), norm_sq(g) * lbp_error(g, lbg), 1e-9 * norm_sq(g));
    EXPECT_NEAR(dot(resid, lbg), 0.0, 1e-9 * norm(g) * norm(lbg));
  }
}

TEST_P(ProjectionProperty, GateIsScaleInvariant) {
  const std::size_t dim = GetParam();
  RngStream rng(dim, 1);
  for (int i = 0; i < 100; ++i) {
    const ParamVector g = random_vector(rng, dim);
    const ParamVector lbg = random_vector(rng, dim);
    const double c = rng.uniform(0.1, 10.0) * (i % 2 ? -1.0 : 1.0);
    EXPECT_NEAR(lbp_error(scale(c, g), lbg), lbp_error(g, lbg), 1e-12);
    EXPECT_NEAR(lbc(scale(c, g), lbg), c * lbc(g, lbg), 1e-12 * std::abs(c * lbc(g, lbg)) + 1e-15);
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, ProjectionProperty, ::testing::Values(2u, 10u, 1000u));

TEST(RunLbgm, DeltaZeroMatchesVanillaBitForBit) {
  ExperimentConfig cfg = small_config(Algorithm::kLbgm);
  cfg.lbgm.delta_threshold = 0.0;
  const Experiment exp = make_experiment(cfg);
  EXPECT_EQ(to_csv(run_lbgm(exp).metrics), to_csv(run_vanilla(exp).metrics));
}

TEST(RunLbgm, LedgerBelowVanillaFromRoundTwo) {
  ExperimentConfig cfg = small_config(Algorithm::kLbgm);
  cfg.train.rounds = 30;
  const Experiment exp = make_experiment(cfg);
  const RunResult lb = run_lbgm(exp);
  const RunResult va = run_vanilla(exp);
  for (std::size_t t = 1; t <= cfg.train.rounds; ++t) {
    const bool all_full = lb.metrics.rows[t].cum_floats == va.metrics.rows[t].cum_floats;
    EXPECT_LE(lb.metrics.rows[t].cum_floats, va.metrics.rows[t].cum_floats);
    if (t >= 2) EXPECT_FALSE(all_full) << "round " << t;
  }
}

TEST(RunLbgm, ConstantGradientSendsOneFullGradient) {
  // One sample x = (1, 2), y = 0 under a bias-free linear model. A learning
  // rate far below double resolution freezes theta, so every full-batch
  // gradient is the same vector.
  ExperimentConfig cfg;
  cfg.algorithm = Algorithm::kLbgm;
  cfg.model.kind = ModelKind::kLinearRegression;
  cfg.data.workers = 1;
  cfg.train.batch_size = 1;
  cfg.train.tau = 1;
  cfg.train.eta = 1e-300;
  cfg.train.rounds = 25;
  Dataset ds;
  ds.n = 1;
  ds.dim = 2;
  ds.target_dim = 1;
  ds.inputs = {1.0, 2.0};
  ds.targets = {0.0};
  Experiment exp = make_experiment(cfg, ds, ds);
  exp.model = Model::linear_regression(2, 1, false);
  exp.theta0 = ParamVector{1.0, 1.0};
  std::size_t full = 0;
  const RunResult r = run_lbgm(exp, [&](std::size_t, const auto&, const auto&, const RoundMessages& messages) {
    for (const auto& [k, msg] : messages) full += !msg.is_scalar();
  });
  EXPECT_EQ(full, 1u);
  EXPECT_EQ(r.ledger.total_floats(), 2.0 + 24.0);
}

TEST(RunLbgm, ServerAndWorkerLbgsStayCoherent) {
  ExperimentConfig cfg = small_config(Algorithm::kLbgm);
  cfg.train.rounds = 20;
  const Experiment exp = make_experiment(cfg);
  std::size_t checks = 0;
  run_lbgm(exp, [&](std::size_t, const std::vector<WorkerState>& workers, const ServerState& server,
                    const RoundMessages& messages) {
    for (const auto& [k, msg] : messages) {
      ASSERT_TRUE(workers[k].lbg);
      ASSERT_TRUE(server.lbg_copies.count(k));
      EXPECT_TRUE(bit_equal(*workers[k].lbg, server.lbg_copies.at(k)));
      ++checks;
    }
  });
  EXPECT_EQ(checks, cfg.train.rounds * cfg.data.workers);
}

TEST(RunLbgm, DeltaSquaredProxyLogged) {
  ExperimentConfig cfg = small_config(Algorithm::kLbgm);
  cfg.train.rounds = 20;
  const RunResult on = run_lbgm(make_experiment(cfg));
  cfg.lbgm.monitor_delta_sq = false;
  const RunResult off = run_lbgm(make_experiment(cfg));
  double on_max = 0.0;
  for (const auto& row : on.metrics.rows) on_max = std::max(on_max, row.delta_sq_proxy);
  EXPECT_GT(on_max, 0.0);
  for (const auto& row : off.metrics.rows) EXPECT_EQ(row.delta_sq_proxy, 0.0);
}

TEST(RunLbgmSampled, HalfOfTenWorkersPerRound) {
  ExperimentConfig cfg = small_config(Algorithm::kLbgmSampled);
  cfg.data.workers = 10;
  cfg.train.rounds = 15;
  const Experiment exp = make_experiment(cfg);
  std::set<std::size_t> seen;
  run_lbgm_sampled(exp, 0.5, [&](std::size_t, const auto&, const auto&, const RoundMessages& messages) {
    EXPECT_EQ(messages.size(), 5u);
    for (const auto& [k, msg] : messages) {
      if (!seen.count(k)) EXPECT_EQ(msg.kind(), MessageKind::kFullGradient) << "worker " << k;
      seen.insert(k);
    }
  });
  EXPECT_GT(seen.size(), 5u);
}

TEST(RunLbgmSampled, FullFractionRescalesServerStepByOneOverK) {
  ExperimentConfig cfg = small_config(Algorithm::kLbgm);
  cfg.train.rounds = 1;
  const Experiment exp = make_experiment(cfg);
  const ParamVector full = run_lbgm(exp).theta_final;
  const ParamVector sampled = run_lbgm_sampled(exp, 1.0).theta_final;
  const double K = static_cast<double>(cfg.data.workers);
  for (std::size_t i = 0; i < full.dim(); ++i) {
    const double step_full = exp.theta0[i] - full[i];
    const double step_sampled = exp.theta0[i] - sampled[i];
    EXPECT_NEAR(step_sampled, step_full / K, 1e-12 * (std::abs(step_full) + std::abs(exp.theta0[i])));
  }
}

TEST(RunLbgmSampled, UnsampledWorkersKeepStaleLbgs) {
  ExperimentConfig cfg = small_config(Algorithm::kLbgmSampled);
  cfg.data.workers = 10;
  cfg.train.rounds = 12;
  const Experiment exp = make_experiment(cfg);
  std::map<std::size_t, ParamVector> previous;
  run_lbgm_sampled(exp, 0.3, [&](std::size_t, const std::vector<WorkerState>& workers, const ServerState& server,
                                 const RoundMessages& messages) {
    std::set<std::size_t> active;
    for (const auto& [k, msg] : messages) active.insert(k);
    for (const auto& [k, lbg] : previous) {
      if (!active.count(k)) {
        EXPECT_TRUE(bit_equal(server.lbg_copies.at(k), lbg));
        EXPECT_TRUE(bit_equal(*workers[k].lbg, lbg));
      }
    }
    for (const auto& [k, lbg] : server.lbg_copies) previous.insert_or_assign(k, lbg);
  });
}
