// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lbgm {

std::size_t topk_count(double k_frac, std::size_t dim) {
  const auto k = static_cast<std::size_t>(std::llround(k_frac * static_cast<double>(dim)));
  return std::clamp<std::size_t>(k, 1, dim);
}

Payload compress(const CompressorSpec& spec, const ParamVector& g) {
  switch (spec.kind) {
    case CompressorKind::kIdentity:
      return g;
    case CompressorKind::kTopK:
      return topk(g, spec.k);
    case CompressorKind::kRankR:
      return rank_r(g, spec.shapes, spec.rank);
    case CompressorKind::kSign:
      return sign_compress(g);
  }
  throw std::logic_error("compress: unhandled compressor");
}

Payload CompressedUplink::compress_with_feedback(WorkerState& worker, const ParamVector& accumulated) const {
  if (!(spec_.error_feedback && spec_.kind == CompressorKind::kTopK)) return compress(spec_, accumulated);
  if (!worker.ef_residual) worker.ef_residual = ParamVector(accumulated.dim());
  auto [payload, residual] =
      ef_wrap(*worker.ef_residual, accumulated, [this](const ParamVector& p) { return compress(spec_, p); });
  worker.ef_residual = std::move(residual);
  return std::move(payload);
}

UplinkMessage CompressedUplink::encode(WorkerState& worker, const ParamVector& accumulated) {
  return UplinkMessage::full(compress_with_feedback(worker, accumulated));
}

ParamVector CompressedUplink::decode(ServerState&, std::size_t, const UplinkMessage& msg) {
  return densify(msg.payload());
}

UplinkMessage LbgmUplink::encode(WorkerState& worker, const ParamVector& accumulated) {
  return stack_lbgm(compress_with_feedback(worker, accumulated), worker.lbg, cfg_);
}

ParamVector LbgmUplink::decode(ServerState& server, std::size_t worker_id, const UplinkMessage& msg) {
  return reconstruct(server, worker_id, msg);
}

namespace {

CompressorSpec compressor_for(const Experiment& exp, CompressorKind kind) {
  CompressorSpec spec;
  spec.kind = kind;
  spec.k = topk_count(exp.config.compress.k_frac, exp.model.param_dim());
  spec.rank = exp.config.compress.rank;
  spec.error_feedback = exp.config.compress.error_feedback;
  spec.shapes = exp.model.layer_shapes();
  return spec;
}

}  // namespace

RunResult run_lbgm(const Experiment& exp, const RoundObserver& observer) {
  return run_compressed(exp, CompressorKind::kIdentity, true, observer);
}

RunResult run_lbgm(const ExperimentConfig& cfg) { return run_lbgm(make_experiment(cfg)); }

RunResult run_lbgm_sampled(const Experiment& exp, double fraction, const RoundObserver& observer) {
  LbgmUplink uplink(compressor_for(exp, CompressorKind::kIdentity), exp.config.lbgm);
  FederatedOptions opts;
  opts.sampled = true;
  opts.sample_fraction = fraction;
  opts.monitor_delta_sq = exp.config.lbgm.monitor_delta_sq;
  return run_federated(exp, uplink, opts, observer);
}

RunResult run_lbgm_sampled(const ExperimentConfig& cfg, double fraction) {
  return run_lbgm_sampled(make_experiment(cfg), fraction);
}

RunResult run_compressed(const Experiment& exp, CompressorKind kind, bool with_lbgm, const RoundObserver& observer) {
  FederatedOptions opts;
  if (kind == CompressorKind::kSign && exp.config.compress.sign_rule == SignRule::kMajority) {
    opts.rule = AggregationRule::kSignMajority;
  }
  const CompressorSpec spec = compressor_for(exp, kind);
  if (with_lbgm) {
    opts.monitor_delta_sq = exp.config.lbgm.monitor_delta_sq;
    LbgmUplink uplink(spec, exp.config.lbgm);
    return run_federated(exp, uplink, opts, observer);
  }
  if (kind == CompressorKind::kIdentity) {
    DenseUplink uplink;
    return run_federated(exp, uplink, opts, observer);
  }
  CompressedUplink uplink(spec);
  return run_federated(exp, uplink, opts, observer);
}

RunResult run_algorithm(const Experiment& exp, const RoundObserver& observer) {
  switch (exp.config.algorithm) {
    case Algorithm::kVanilla:
      return run_compressed(exp, CompressorKind::kIdentity, false, observer);
    case Algorithm::kLbgm:
      return run_lbgm(exp, observer);
    case Algorithm::kLbgmSampled:
      return run_lbgm_sampled(exp, exp.config.train.sample_fraction, observer);
    case Algorithm::kTopK:
      return run_compressed(exp, CompressorKind::kTopK, false, observer);
    case Algorithm::kTopKLbgm:
      return run_compressed(exp, CompressorKind::kTopK, true, observer);
    case Algorithm::kRankR:
      return run_compressed(exp, CompressorKind::kRankR, false, observer);
    case Algorithm::kRankRLbgm:
      return run_compressed(exp, CompressorKind::kRankR, true, observer);
    case Algorithm::kSign:
      return run_compressed(exp, CompressorKind::kSign, false, observer);
    case Algorithm::kSignLbgm:
      return run_compressed(exp, CompressorKind::kSign, true, observer);
    case Algorithm::kCentralizedAnalyze:
      break;
  }
  throw std::invalid_argument("run_algorithm: centralized_analyze is not a federated run");
}

}  // namespace lbgm
