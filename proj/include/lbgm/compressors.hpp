// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Baseline gradient compressors (top-K, rank-r SVD, sign) and stacking of
// the look-back gate on top of their outputs.

#ifndef LBGM_COMPRESSORS_HPP_
#define LBGM_COMPRESSORS_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <utility>

#include "lbgm/lbgm.hpp"
#include "lbgm/payloads.hpp"

namespace lbgm {

/// Keeps the k largest-magnitude entries; ties go to the lower index.
SparsePayload topk(const ParamVector& g, std::size_t k);

/// sign(g_i) with sign(0) = +1.
SignPayload sign_compress(const ParamVector& g);

/// Best rank-r approximation of every matrix block via SVD; vector blocks
/// (biases, single-row or single-column weights) pass through dense. The
/// rank is clamped to min(rows, cols) per block. Each left singular vector
/// is signed so that its first nonzero entry is positive.
LowRankPayload rank_r(const ParamVector& g, std::span<const LayerShape> layer_shapes, std::size_t r);

using CompressFn = std::function<Payload(const ParamVector&)>;

struct ErrorFeedbackResult {
  Payload payload;
  ParamVector residual;
};

/// p = g + residual, c = compress(p), residual' = p - densify(c).
ErrorFeedbackResult ef_wrap(const ParamVector& residual, const ParamVector& g, const CompressFn& compress);

/// The look-back gate applied to a compressed gradient against the stored
/// (densified) compressed LBG. Full sends cost the compressor's payload.
UplinkMessage stack_lbgm(const Payload& compressed_g, std::optional<ParamVector>& compressed_lbg,
                         const LbgmConfig& cfg);

}  // namespace lbgm

#endif  // LBGM_COMPRESSORS_HPP_
