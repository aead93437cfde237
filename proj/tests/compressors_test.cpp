// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lbgm/compressors.hpp"
#include "lbgm/simulation.hpp"
#include "test_support.hpp"

using namespace lbgm;
using lbgm::testing::random_vector;
using lbgm::testing::small_config;

namespace {

// Brute-force top-k index set: full sort by (|v| desc, index asc).
std::vector<std::size_t> topk_oracle(const ParamVector& g, std::size_t k) {
  std::vector<std::size_t> idx(g.dim());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(g[a]) > std::abs(g[b]); });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

double block_error(const ParamVector& g, const ParamVector& approx) { return norm_sq(axpy(-1.0, approx, g)); }

}  // namespace

TEST(TopK, FullKeepsEverything) {
  const ParamVector g{0.5, -1, 0, 3};
  EXPECT_TRUE(bit_equal(densify(topk(g, 4)), g));
}

TEST(TopK, LargestMagnitude) {
  const SparsePayload p = topk({0.1, -3, 2}, 1);
  EXPECT_EQ(p.indices, std::vector<std::size_t>{1});
  EXPECT_EQ(p.values, std::vector<double>{-3});
  EXPECT_EQ(p.dim, 3u);
}

TEST(TopK, TiesBreakToLowerIndex) {
  const ParamVector g{1, -1, 1};
  EXPECT_EQ(topk(g, 2).indices, topk_oracle(g, 2));
  EXPECT_EQ(topk(g, 2).indices, (std::vector<std::size_t>{0, 1}));
}

TEST(TopK, MatchesSortOracleWithManyTies) {
  RngStream rng(1, 0);
  for (int trial = 0; trial < 200; ++trial) {
    ParamVector g(30);
    for (std::size_t i = 0; i < 30; ++i) g[i] = static_cast<double>(static_cast<int>(rng.uniform(-4, 4)));
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform(0, 30));
    EXPECT_EQ(topk(g, k).indices, topk_oracle(g, k));
  }
}

TEST(TopK, OutOfRangeThrows) {
  EXPECT_THROW(topk({1, 2}, 0), std::invalid_argument);
  EXPECT_THROW(topk({1, 2}, 3), std::invalid_argument);
}

TEST(TopK, Idempotent) {
  RngStream rng(2, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const ParamVector g = random_vector(rng, 50);
    const std::size_t k = 1 + trial % 50;
    const SparsePayload once = topk(g, k);
    const SparsePayload twice = topk(densify(once), k);
    EXPECT_EQ(once.indices, twice.indices);
    EXPECT_EQ(once.values, twice.values);
  }
}

TEST(ErrorFeedback, IdentityLeavesZeroResidual) {
  RngStream rng(3, 0);
  ParamVector residual(8);
  for (int t = 0; t < 10; ++t) {
    auto [c, next] = ef_wrap(residual, random_vector(rng, 8), [](const ParamVector& p) { return Payload{p}; });
    EXPECT_TRUE(next.is_zero());
    residual = next;
  }
}

TEST(ErrorFeedback, LosslessTopKLeavesZeroResidual) {
  RngStream rng(4, 0);
  const auto [c, next] =
      ef_wrap(random_vector(rng, 6), random_vector(rng, 6), [](const ParamVector& p) { return Payload{topk(p, 6)}; });
  EXPECT_TRUE(next.is_zero());
}

TEST(ErrorFeedback, ConservationIsExact) {
  RngStream rng(5, 0);
  ParamVector residual(40);
  for (int t = 0; t < 200; ++t) {
    const ParamVector g = random_vector(rng, 40, std::pow(10.0, rng.uniform(-4, 4)));
    const std::size_t k = 1 + t % 40;
    const auto [c, next] = ef_wrap(residual, g, [k](const ParamVector& p) { return Payload{topk(p, k)}; });
    EXPECT_TRUE(bit_equal(axpy(1.0, next, densify(c)), axpy(1.0, residual, g)));
    residual = next;
  }
}

TEST(SignCompress, Examples) {
  EXPECT_EQ(densify(sign_compress({-0.5, 2})), ParamVector({-1, 1}));
  EXPECT_EQ(densify(sign_compress(ParamVector(3))), ParamVector({1, 1, 1}));
  const ParamVector g{-3, 0.25, -1e-9, 7};
  EXPECT_EQ(sign_compress(scale(4.5, g)).signs, sign_compress(g).signs);
  EXPECT_EQ(sign_compress(g).signs.size(), 4u);
}

TEST(RankR, OuterProductIsExactAtRankOne) {
  const std::vector<double> u{1, -2, 0.5};
  const std::vector<double> v{3, 1, -1, 2};
  ParamVector g(12);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) g[i * 4 + j] = u[i] * v[j];
  const std::vector<LayerShape> shapes{{3, 4, false}};
  const ParamVector back = densify(rank_r(g, shapes, 1));
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(back[i], g[i], 1e-9 * norm(g));
}

TEST(RankR, FullRankIsExact) {
  RngStream rng(6, 0);
  const ParamVector g = random_vector(rng, 4 * 3 + 4);
  const std::vector<LayerShape> shapes{{4, 3, false}, {4, 1, true}};
  const ParamVector back = densify(rank_r(g, shapes, 3));
  for (std::size_t i = 0; i < g.dim(); ++i) EXPECT_NEAR(back[i], g[i], 1e-9 * norm(g));
  // Requested rank above min(rows, cols) clamps rather than failing.
  const ParamVector clamped = densify(rank_r(g, shapes, 10));
  for (std::size_t i = 0; i < g.dim(); ++i) EXPECT_NEAR(clamped[i], g[i], 1e-9 * norm(g));
}

TEST(RankR, HandSvdExample) {
  const std::vector<LayerShape> shapes{{2, 2, false}};
  const ParamVector back = densify(rank_r({2, 0, 0, 1}, shapes, 1));
  EXPECT_NEAR(back[0], 2.0, 1e-12);
  EXPECT_NEAR(back[1], 0.0, 1e-12);
  EXPECT_NEAR(back[2], 0.0, 1e-12);
  EXPECT_NEAR(back[3], 0.0, 1e-12);
}

TEST(RankR, LeftFactorsHavePositiveLeadingEntry) {
  RngStream rng(7, 0);
  const std::vector<LayerShape> shapes{{5, 4, false}};
  const LowRankPayload p = rank_r(random_vector(rng, 20), shapes, 2);
  const LowRankBlock& b = p.blocks[0];
  for (std::size_t j = 0; j < b.rank; ++j) {
    for (std::size_t i = 0; i < b.shape.rows; ++i) {
      const double v = b.left[i * b.rank + j];
      if (std::abs(v) > 1e-12) {
        EXPECT_GT(v, 0.0);
        break;
      }
    }
  }
}

TEST(RankR, ErrorNonIncreasingInRank) {
  RngStream rng(8, 0);
  const Model m = Model::mlp1h(6, 5, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const ParamVector g = random_vector(rng, m.param_dim());
    double prev = block_error(g, densify(rank_r(g, m.layer_shapes(), 1)));
    for (std::size_t r = 2; r <= 5; ++r) {
      const double err = block_error(g, densify(rank_r(g, m.layer_shapes(), r)));
      EXPECT_LE(err, prev * (1 + 1e-12) + 1e-24);
      prev = err;
    }
  }
}

TEST(RankR, BadInputsThrow) {
  const std::vector<LayerShape> shapes{{2, 2, false}};
  EXPECT_THROW(rank_r({1, 2, 3, 4}, shapes, 0), std::invalid_argument);
  EXPECT_THROW(rank_r({1, 2, 3}, shapes, 1), std::invalid_argument);
}

TEST(LedgerCost, Definitions) {
  EXPECT_EQ(ledger_cost(UplinkMessage::scalar(0.3)), (WireCost{1, 32}));
  EXPECT_EQ(ledger_cost(UplinkMessage::full(ParamVector(1000))), (WireCost{1000, 32000}));
  ParamVector g(1000);
  for (std::size_t i = 0; i < g.dim(); ++i) g[i] = static_cast<double>(i) - 500.5;
  EXPECT_EQ(ledger_cost(UplinkMessage::full(topk(g, 100))), (WireCost{200, 6400}));
  EXPECT_EQ(ledger_cost(UplinkMessage::full(sign_compress(g))), (WireCost{1000.0 / 32.0, 1000}));
  const Model m = Model::mlp1h(10, 8, 5);
  RngStream rng(9, 0);
  const double low_rank = 2.0 * (8 + 10) + 8 + 2.0 * (5 + 8) + 5;
  EXPECT_EQ(ledger_cost(UplinkMessage::full(rank_r(random_vector(rng, m.param_dim()), m.layer_shapes(), 2))),
            (WireCost{low_rank, static_cast<std::uint64_t>(low_rank) * 32}));
}

TEST(LedgerCost, MessageKinds) {
  EXPECT_EQ(UplinkMessage::full(ParamVector(3)).kind(), MessageKind::kFullGradient);
  EXPECT_EQ(UplinkMessage::full(topk({1, 2, 3}, 1)).kind(), MessageKind::kCompressedFull);
  EXPECT_THROW(UplinkMessage::scalar(1.0).payload(), std::logic_error);
  EXPECT_THROW(UplinkMessage::full(ParamVector(2)).rho(), std::logic_error);
}

TEST(StackLbgm, IdentityCompressorIsPlainLbgm) {
  RngStream rng(10, 0);
  std::optional<ParamVector> a;
  std::optional<ParamVector> b;
  const LbgmConfig cfg{0.5, true};
  const ParamVector base = random_vector(rng, 10);
  for (int t = 0; t < 30; ++t) {
    const ParamVector g = axpy(1.0, random_vector(rng, 10, 0.6), base);
    const UplinkMessage x = stack_lbgm(Payload{g}, a, cfg);
    const UplinkMessage y = decide_message(g, b, cfg);
    ASSERT_EQ(x.kind(), y.kind());
    if (x.is_scalar()) EXPECT_EQ(x.rho(), y.rho());
    EXPECT_TRUE(bit_equal(*a, *b));
  }
}

TEST(StackLbgm, FullSendKeepsCompressorCostAndStoresCompressedLbg) {
  std::optional<ParamVector> lbg;
  const SparsePayload c = topk({5, -1, 0.5, 3}, 2);
  const UplinkMessage msg = stack_lbgm(Payload{c}, lbg, {});
  EXPECT_EQ(msg.kind(), MessageKind::kCompressedFull);
  EXPECT_EQ(msg.cost(), (WireCost{4, 128}));
  EXPECT_EQ(*lbg, ParamVector({5, 0, 0, 3}));
}

TEST(StackLbgm, SignScalarUsesPlusMinusOneVectors) {
  std::optional<ParamVector> lbg = ParamVector{1, 1, -1, -1};
  const UplinkMessage msg = stack_lbgm(Payload{sign_compress({2, 3, -1, 4})}, lbg, {0.3, true});
  // (1,1,-1,1) against (1,1,-1,-1): cos = 1/2, sin^2 = 0.75 > 0.3.
  EXPECT_FALSE(msg.is_scalar());
  const UplinkMessage again = stack_lbgm(Payload{sign_compress({2, 3, -1, 4})}, lbg, {0.3, true});
  ASSERT_TRUE(again.is_scalar());
  EXPECT_EQ(again.rho(), 1.0);
}

class StackedRuns : public ::testing::TestWithParam<CompressorKind> {};

TEST_P(StackedRuns, DeltaZeroMatchesCompressorLedger) {
  ExperimentConfig cfg = small_config();
  cfg.lbgm.delta_threshold = 0.0;
  const Experiment exp = make_experiment(cfg);
  const RunResult base = run_compressed(exp, GetParam(), false);
  const RunResult stacked = run_compressed(exp, GetParam(), true);
  EXPECT_EQ(to_csv(stacked.ledger), to_csv(base.ledger));
  EXPECT_EQ(stacked.ledger.total_bits(), base.ledger.total_bits());
}

TEST_P(StackedRuns, LedgerNeverAboveCompressorAlone) {
  ExperimentConfig cfg = small_config();
  cfg.train.rounds = 30;
  const Experiment exp = make_experiment(cfg);
  const RunResult base = run_compressed(exp, GetParam(), false);
  const RunResult stacked = run_compressed(exp, GetParam(), true);
  for (std::size_t t = 0; t < base.metrics.rows.size(); ++t) {
    EXPECT_LE(stacked.metrics.rows[t].cum_bits, base.metrics.rows[t].cum_bits) << "round " << t;
  }
}

INSTANTIATE_TEST_SUITE_P(Compressors, StackedRuns,
                         ::testing::Values(CompressorKind::kIdentity, CompressorKind::kTopK, CompressorKind::kRankR,
                                           CompressorKind::kSign));

TEST(StackedRuns, TopKPlusLbgmSendsFewerFloats) {
  // Desk-scale benchmark: 10 workers, label_shard(3), 200 rounds.
  ExperimentConfig cfg;
  cfg.data.partition = PartitionMode::kLabelShard;
  cfg.data.shard_labels = 3;
  const Experiment exp = make_experiment(cfg);
  const RunResult base = run_compressed(exp, CompressorKind::kTopK, false);
  const RunResult stacked = run_compressed(exp, CompressorKind::kTopK, true);
  EXPECT_LT(stacked.ledger.total_floats(), base.ledger.total_floats());
}

TEST(TopkCount, RoundsAndClamps) {
  EXPECT_EQ(topk_count(0.1, 1000), 100u);
  EXPECT_EQ(topk_count(0.1, 4), 1u);
  EXPECT_EQ(topk_count(1.0, 7), 7u);
  EXPECT_EQ(topk_count(0.001, 50), 1u);
}
