// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Look-back gradient multiplier: a worker whose accumulated gradient g is
// close in direction to its look-back gradient (the last gradient it sent
// in full) transmits only the scalar projection coefficient
//
//   rho = <g, lbg> / |lbg|^2
//
// and the server rebuilds rho * lbg from its own copy of the LBG. The gate
// is the look-back phase error sin^2(alpha) = 1 - cos^2(g, lbg) compared
// against a fixed threshold delta in [0, 1].

#ifndef LBGM_LBGM_HPP_
#define LBGM_LBGM_HPP_

#include <optional>

#include "lbgm/message.hpp"
#include "lbgm/state.hpp"

namespace lbgm {

struct LbgmConfig {
  double delta_threshold = 0.2;
  /// Log max_k |d_k|^2 sin^2(alpha_k) with d_k = g_k / tau each round.
  bool monitor_delta_sq = true;
};

void validate(const LbgmConfig& cfg);

/// sin^2 of the angle between g and lbg, in [0, 1]. Returns 0 when g is
/// zero and 1 when only lbg is zero.
double lbp_error(const ParamVector& g, const ParamVector& lbg);

/// Scalar projection coefficient of g onto lbg. Throws std::domain_error
/// when lbg is zero.
double lbc(const ParamVector& g, const ParamVector& lbg);

/// Worker-side gate over an arbitrary payload (dense or compressed). The
/// gate runs on the densified payload. Without a stored LBG, when the LBG
/// is zero but the gradient is not, or when the phase error exceeds the
/// threshold, the full payload is sent and `lbg` is replaced by its
/// densification; otherwise only the LBC is sent. A zero gradient is sent
/// as rho = 0.
UplinkMessage decide_payload(const Payload& current, std::optional<ParamVector>& lbg, const LbgmConfig& cfg);

/// decide_payload for an uncompressed accumulated gradient.
UplinkMessage decide_message(const ParamVector& g, std::optional<ParamVector>& lbg, const LbgmConfig& cfg);

/// Server-side reconstruction. Scalar messages scale the stored LBG copy;
/// full messages are densified and replace the stored copy. Throws
/// std::logic_error for a scalar from a worker with no stored LBG.
ParamVector reconstruct(ServerState& server, std::size_t worker_id, const UplinkMessage& msg);

}  // namespace lbgm

#endif  // LBGM_LBGM_HPP_
