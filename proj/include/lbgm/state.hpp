// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LBGM_STATE_HPP_
#define LBGM_STATE_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "lbgm/numerics.hpp"

namespace lbgm {

/// Everything a worker keeps between rounds.
struct WorkerState {
  WorkerState(std::size_t id, std::vector<std::size_t> shard_indices, ParamVector theta, RngStream stream)
      : worker_id(id), shard(std::move(shard_indices)), theta_local(std::move(theta)), rng(std::move(stream)) {}

  std::size_t worker_id;
  std::vector<std::size_t> shard;
  ParamVector theta_local;
  std::optional<ParamVector> lbg;          // worker copy of the look-back gradient
  std::optional<ParamVector> ef_residual;  // error-feedback memory
  RngStream rng;

  // Minibatch cursor over the current shuffled pass of the shard.
  std::vector<std::size_t> pass_order;
  std::size_t cursor = 0;
};

struct ServerState {
  explicit ServerState(ParamVector theta) : theta_global(std::move(theta)) {}

  ParamVector theta_global;
  std::map<std::size_t, ParamVector> lbg_copies;
  std::size_t round = 0;
};

}  // namespace lbgm

#endif  // LBGM_STATE_HPP_
