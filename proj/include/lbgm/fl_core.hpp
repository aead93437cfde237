// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Federated training loop: tau-step local SGD on every worker, uplink
// encoding, and weighted aggregation of the (reconstructed) accumulated
// gradients at the server.

#ifndef LBGM_FL_CORE_HPP_
#define LBGM_FL_CORE_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "lbgm/experiment.hpp"
#include "lbgm/message.hpp"
#include "lbgm/metrics.hpp"
#include "lbgm/state.hpp"

namespace lbgm {

/// Next minibatch from the worker's current pass over its shard, sorted
/// ascending. The shard is reshuffled at the start of every pass; the last
/// minibatch of a pass may be short.
std::vector<std::size_t> next_minibatch(WorkerState& worker, std::size_t batch_size);

/// Runs tau local SGD steps from theta_global and returns the plain sum of
/// the tau minibatch gradients. Leaves the final local model in
/// worker.theta_local.
ParamVector local_round(WorkerState& worker, const ParamVector& theta_global, const RoundConfig& cfg,
                        const Model& model, const Dataset& dataset);

/// theta - step * sum_k weights[k] * grads[k], accumulated in ascending
/// worker order. `weights` is indexed by worker id.
ParamVector aggregate(const ParamVector& theta, const std::map<std::size_t, ParamVector>& grads,
                      const std::vector<double>& weights, double step);

/// As above, applied to and stored in server.theta_global.
ParamVector aggregate(ServerState& server, const std::map<std::size_t, ParamVector>& grads,
                      const std::vector<double>& weights, double step);

/// Uplink protocol for one algorithm. encode() runs on the worker after its
/// local round; decode() runs inside the server's aggregation barrier in
/// ascending worker order.
class Uplink {
 public:
  virtual ~Uplink() = default;
  virtual UplinkMessage encode(WorkerState& worker, const ParamVector& accumulated) = 0;
  virtual ParamVector decode(ServerState& server, std::size_t worker_id, const UplinkMessage& msg) = 0;
};

/// Sends every accumulated gradient in full.
class DenseUplink : public Uplink {
 public:
  UplinkMessage encode(WorkerState& worker, const ParamVector& accumulated) override;
  ParamVector decode(ServerState& server, std::size_t worker_id, const UplinkMessage& msg) override;
};

enum class AggregationRule {
  kWeightedSum,   // theta -= step * sum_k w_k g_k
  kSignMajority,  // theta -= step * sign(sum_k w_k g_k), sign(0) = +1
};

struct FederatedOptions {
  /// Device sampling: each round draws ceil(fraction * K) workers from the
  /// server stream and scales the step by 1/|K'|, with the weights w_k left
  /// unnormalised over the sampled set.
  bool sampled = false;
  double sample_fraction = 1.0;
  AggregationRule rule = AggregationRule::kWeightedSum;
  bool monitor_delta_sq = false;
};

/// Messages sent in one round, in ascending worker order.
using RoundMessages = std::vector<std::pair<std::size_t, UplinkMessage>>;

/// Called after each round's aggregation (rounds are numbered from 1).
using RoundObserver =
    std::function<void(std::size_t round, const std::vector<WorkerState>&, const ServerState&, const RoundMessages&)>;

struct RunResult {
  MetricsTable metrics;
  CommLedger ledger;
  ParamVector theta_final;
};

/// ceil(fraction * K), at least 1; tolerant of fractions like 0.3 whose
/// product with K lands just above an integer.
std::size_t sampled_worker_count(double fraction, std::size_t workers);

RunResult run_federated(const Experiment& exp, Uplink& uplink, const FederatedOptions& opts,
                        const RoundObserver& observer = {});

/// Evaluates theta on the experiment's train and test sets:
/// {train loss, test accuracy (classifiers) or test loss (regression)}.
std::pair<double, double> evaluate(const Experiment& exp, const ParamVector& theta);

RunResult run_vanilla(const Experiment& exp);
RunResult run_vanilla(const ExperimentConfig& cfg);

}  // namespace lbgm

#endif  // LBGM_FL_CORE_HPP_
