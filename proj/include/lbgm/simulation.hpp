// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Federated runs for every algorithm: LBGM (full and device-sampled),
// compressor baselines, and LBGM stacked on each compressor.

#ifndef LBGM_SIMULATION_HPP_
#define LBGM_SIMULATION_HPP_

#include <cstddef>
#include <vector>

#include "lbgm/compressors.hpp"
#include "lbgm/fl_core.hpp"

namespace lbgm {

enum class CompressorKind { kIdentity, kTopK, kRankR, kSign };

struct CompressorSpec {
  CompressorKind kind = CompressorKind::kIdentity;
  std::size_t k = 0;           // top-K entries kept
  std::size_t rank = 2;        // rank-r
  bool error_feedback = false;  // applied to top-K only
  std::vector<LayerShape> shapes;
};

/// k = max(1, round(k_frac * M)).
std::size_t topk_count(double k_frac, std::size_t dim);

Payload compress(const CompressorSpec& spec, const ParamVector& g);

/// Compressor baseline: every round sends the compressed gradient.
class CompressedUplink : public Uplink {
 public:
  explicit CompressedUplink(CompressorSpec spec) : spec_(std::move(spec)) {}
  UplinkMessage encode(WorkerState& worker, const ParamVector& accumulated) override;
  ParamVector decode(ServerState& server, std::size_t worker_id, const UplinkMessage& msg) override;

 protected:
  /// Compressed payload, with error feedback when configured.
  Payload compress_with_feedback(WorkerState& worker, const ParamVector& accumulated) const;

  CompressorSpec spec_;
};

/// Look-back gate over the (optionally compressed) accumulated gradient.
/// With the identity compressor this is plain LBGM.
class LbgmUplink : public CompressedUplink {
 public:
  LbgmUplink(CompressorSpec spec, LbgmConfig cfg) : CompressedUplink(std::move(spec)), cfg_(cfg) {}
  UplinkMessage encode(WorkerState& worker, const ParamVector& accumulated) override;
  ParamVector decode(ServerState& server, std::size_t worker_id, const UplinkMessage& msg) override;

 private:
  LbgmConfig cfg_;
};

RunResult run_lbgm(const Experiment& exp, const RoundObserver& observer = {});
RunResult run_lbgm(const ExperimentConfig& cfg);

/// Device sampling with the 1/|K'| step scaling; `fraction` overrides the
/// config's sample fraction.
RunResult run_lbgm_sampled(const Experiment& exp, double fraction, const RoundObserver& observer = {});
RunResult run_lbgm_sampled(const ExperimentConfig& cfg, double fraction);

/// Compressor baseline (with_lbgm = false) or LBGM stacked on it.
RunResult run_compressed(const Experiment& exp, CompressorKind kind, bool with_lbgm,
                         const RoundObserver& observer = {});

/// Dispatches on exp.config.algorithm. Not valid for centralized_analyze.
RunResult run_algorithm(const Experiment& exp, const RoundObserver& observer = {});

}  // namespace lbgm

#endif  // LBGM_SIMULATION_HPP_
