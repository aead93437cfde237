// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LBGM_MESSAGE_HPP_
#define LBGM_MESSAGE_HPP_

#include <optional>

#include "lbgm/payloads.hpp"

namespace lbgm {

enum class MessageKind { kScalarLbc, kFullGradient, kCompressedFull };

/// What a worker sends to the server in one round. The wire cost is fixed
/// when the message is built.
class UplinkMessage {
 public:
  /// `approx_error_sq` is |g - rho * lbg|^2 for the vector the scalar
  /// stands in for; it is diagnostic only and never transmitted.
  static UplinkMessage scalar(double rho, double approx_error_sq = 0.0);
  /// Dense payloads become kFullGradient, anything else kCompressedFull.
  static UplinkMessage full(Payload payload);

  MessageKind kind() const { return kind_; }
  bool is_scalar() const { return kind_ == MessageKind::kScalarLbc; }
  double rho() const;
  const Payload& payload() const;
  double cost_floats() const { return cost_.floats; }
  std::uint64_t cost_bits() const { return cost_.bits; }
  const WireCost& cost() const { return cost_; }
  double approx_error_sq() const { return approx_error_sq_; }

 private:
  UplinkMessage(MessageKind kind, double rho, std::optional<Payload> payload, WireCost cost, double err)
      : kind_(kind), rho_(rho), payload_(std::move(payload)), cost_(cost), approx_error_sq_(err) {}

  MessageKind kind_;
  double rho_;
  std::optional<Payload> payload_;
  WireCost cost_;
  double approx_error_sq_;
};

/// Scalar LBC: (1, 32). Full messages: payload_cost of the payload.
WireCost ledger_cost(const UplinkMessage& msg);

}  // namespace lbgm

#endif  // LBGM_MESSAGE_HPP_
