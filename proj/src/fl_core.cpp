// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/fl_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lbgm {

std::vector<std::size_t> next_minibatch(WorkerState& worker, std::size_t batch_size) {
  if (worker.shard.empty()) {
    throw std::invalid_argument("worker " + std::to_string(worker.worker_id) + " has an empty shard");
  }
  if (batch_size == 0) throw std::invalid_argument("next_minibatch: batch_size must be positive");
  if (worker.cursor == 0 || worker.cursor >= worker.pass_order.size()) {
    worker.pass_order = worker.shard;
    worker.rng.shuffle(worker.pass_order);
    worker.cursor = 0;
  }
  const std::size_t end = std::min(worker.cursor + batch_size, worker.pass_order.size());
  std::vector<std::size_t> batch(worker.pass_order.begin() + static_cast<std::ptrdiff_t>(worker.cursor),
                                 worker.pass_order.begin() + static_cast<std::ptrdiff_t>(end));
  worker.cursor = end;
  std::sort(batch.begin(), batch.end());
  return batch;
}

ParamVector local_round(WorkerState& worker, const ParamVector& theta_global, const RoundConfig& cfg,
                        const Model& model, const Dataset& dataset) {
  validate(cfg);
  if (theta_global.dim() != model.param_dim()) {
    throw std::invalid_argument("local_round: theta has dimension " + std::to_string(theta_global.dim()) +
                                ", model expects " + std::to_string(model.param_dim()));
  }
  worker.theta_local = theta_global;
  ParamVector accumulated(model.param_dim());
  for (std::size_t b = 0; b < cfg.tau; ++b) {
    const auto indices = next_minibatch(worker, cfg.batch_size);
    const ParamVector g = gradient(model, worker.theta_local, dataset.batch(indices));
    worker.theta_local = axpy(-cfg.eta, g, worker.theta_local);
    accumulated = axpy(1.0, g, accumulated);
  }
  return accumulated;
}

namespace {

ParamVector weighted_sum(const std::map<std::size_t, ParamVector>& grads, const std::vector<double>& weights,
                         std::size_t dim) {
  ParamVector sum(dim);
  for (const auto& [k, g] : grads) {
    if (k >= weights.size()) throw std::invalid_argument("aggregate: no weight for worker " + std::to_string(k));
    require_same_dim(g, sum, "aggregate");
    sum = axpy(weights[k], g, sum);
  }
  return sum;
}

}  // namespace

ParamVector aggregate(const ParamVector& theta, const std::map<std::size_t, ParamVector>& grads,
                      const std::vector<double>& weights, double step) {
  return axpy(-step, weighted_sum(grads, weights, theta.dim()), theta);
}

ParamVector aggregate(ServerState& server, const std::map<std::size_t, ParamVector>& grads,
                      const std::vector<double>& weights, double step) {
  server.theta_global = aggregate(server.theta_global, grads, weights, step);
  return server.theta_global;
}

UplinkMessage DenseUplink::encode(WorkerState&, const ParamVector& accumulated) {
  return UplinkMessage::full(accumulated);
}

ParamVector DenseUplink::decode(ServerState&, std::size_t, const UplinkMessage& msg) {
  return densify(msg.payload());
}

std::size_t sampled_worker_count(double fraction, std::size_t workers) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("sample fraction must lie in (0, 1]");
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(workers) - 1e-9));
  return std::clamp<std::size_t>(count, 1, workers);
}

std::pair<double, double> evaluate(const Experiment& exp, const ParamVector& theta) {
  const double train_loss = forward_loss(exp.model, theta, exp.train.full_batch());
  const Batch test = exp.test.full_batch();
  const double test_metric =
      exp.model.is_classifier() ? exp.model.accuracy(theta, test) : forward_loss(exp.model, theta, test);
  return {train_loss, test_metric};
}

RunResult run_federated(const Experiment& exp, Uplink& uplink, const FederatedOptions& opts,
                        const RoundObserver& observer) {
  const std::size_t K = exp.partition.workers();
  const std::uint64_t seed = exp.config.train.seed;
  std::vector<WorkerState> workers;
  workers.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    workers.emplace_back(k, exp.partition.shards[k], exp.theta0, RngStream(seed, k));
  }
  ServerState server(exp.theta0);
  RngStream server_rng(seed, stream_tag::kServer);

  RunResult result{{}, {}, exp.theta0};
  const auto [loss0, metric0] = evaluate(exp, exp.theta0);
  result.metrics.rows.push_back({0, loss0, metric0, 0.0, 0, 0.0, 0.0});

  const double tau = static_cast<double>(exp.round.tau);
  for (std::size_t t = 1; t <= exp.config.train.rounds; ++t) {
    std::vector<std::size_t> participants;
    if (opts.sampled) {
      participants = server_rng.sample_without_replacement(K, sampled_worker_count(opts.sample_fraction, K));
    } else {
      participants.resize(K);
      for (std::size_t k = 0; k < K; ++k) participants[k] = k;
    }

    RoundMessages messages;
    for (std::size_t k : participants) {
      const ParamVector g = local_round(workers[k], server.theta_global, exp.round, exp.model, exp.train);
      messages.emplace_back(k, uplink.encode(workers[k], g));
    }

    std::map<std::size_t, ParamVector> grads;
    std::size_t scalars = 0;
    double proxy = 0.0;
    for (const auto& [k, msg] : messages) {
      grads.emplace(k, uplink.decode(server, k, msg));
      result.ledger.record(t, k, ledger_cost(msg));
      if (msg.is_scalar()) {
        ++scalars;
        proxy = std::max(proxy, msg.approx_error_sq() / (tau * tau));
      }
    }

    const double step = opts.sampled ? exp.round.eta / static_cast<double>(participants.size()) : exp.round.eta;
    if (opts.rule == AggregationRule::kWeightedSum) {
      aggregate(server, grads, exp.partition.weights, step);
    } else {
      const ParamVector sum = weighted_sum(grads, exp.partition.weights, server.theta_global.dim());
      ParamVector direction(sum.dim());
      for (std::size_t i = 0; i < sum.dim(); ++i) direction[i] = sum[i] >= 0.0 ? 1.0 : -1.0;
      server.theta_global = axpy(-step, direction, server.theta_global);
    }
    server.round = t;

    const auto [loss, metric] = evaluate(exp, server.theta_global);
    MetricsRow row;
    row.round = t;
    row.train_loss = loss;
    row.test_metric = metric;
    row.cum_floats = result.ledger.total_floats();
    row.cum_bits = result.ledger.total_bits();
    row.scalar_fraction = static_cast<double>(scalars) / static_cast<double>(messages.size());
    row.delta_sq_proxy = opts.monitor_delta_sq ? proxy : 0.0;
    result.metrics.rows.push_back(row);

    if (observer) observer(t, workers, server, messages);
  }
  result.theta_final = server.theta_global;
  return result;
}

RunResult run_vanilla(const Experiment& exp) {
  DenseUplink uplink;
  return run_federated(exp, uplink, FederatedOptions{});
}

RunResult run_vanilla(const ExperimentConfig& cfg) { return run_vanilla(make_experiment(cfg)); }

}  // namespace lbgm
