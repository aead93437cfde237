// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Wire payloads produced by the gradient compressors, plus their
// densification and communication cost.

#ifndef LBGM_PAYLOADS_HPP_
#define LBGM_PAYLOADS_HPP_

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "lbgm/models.hpp"
#include "lbgm/numerics.hpp"

namespace lbgm {

/// Fixed wire width of one float.
inline constexpr std::uint64_t kFloatBits = 32;

struct SparsePayload {
  std::size_t dim = 0;
  std::vector<std::size_t> indices;  // strictly increasing
  std::vector<double> values;
};

/// One bit per coordinate: true is +1, false is -1.
struct SignPayload {
  std::vector<bool> signs;
};

struct LowRankBlock {
  LayerShape shape;
  std::size_t rank = 0;       // 0 marks a dense passthrough block
  std::vector<double> left;   // rows x rank, singular values folded in
  std::vector<double> right;  // cols x rank
  std::vector<double> dense;  // passthrough values when rank == 0
};

struct LowRankPayload {
  std::size_t dim = 0;
  std::size_t rank = 0;  // requested rank before per-block clamping
  std::vector<LowRankBlock> blocks;
};

using Payload = std::variant<ParamVector, SparsePayload, SignPayload, LowRankPayload>;

struct WireCost {
  double floats = 0.0;
  std::uint64_t bits = 0;

  friend bool operator==(const WireCost&, const WireCost&) = default;
};

ParamVector densify(const Payload& payload);
std::size_t payload_dim(const Payload& payload);

/// Dense: (M, 32M). Sparse: (2k, 64k). Sign: (M/32, M).
/// Low rank: (sum of factor and passthrough sizes, 32x that).
WireCost payload_cost(const Payload& payload);

}  // namespace lbgm

#endif  // LBGM_PAYLOADS_HPP_
