// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/message.hpp"

#include <cmath>
#include <stdexcept>

namespace lbgm {

UplinkMessage UplinkMessage::scalar(double rho, double approx_error_sq) {
  if (!std::isfinite(rho)) throw std::domain_error("UplinkMessage: non-finite LBC");
  return UplinkMessage(MessageKind::kScalarLbc, rho, std::nullopt, WireCost{1.0, kFloatBits}, approx_error_sq);
}

UplinkMessage UplinkMessage::full(Payload payload) {
  const MessageKind kind =
      std::holds_alternative<ParamVector>(payload) ? MessageKind::kFullGradient : MessageKind::kCompressedFull;
  const WireCost cost = payload_cost(payload);
  return UplinkMessage(kind, 0.0, std::move(payload), cost, 0.0);
}

double UplinkMessage::rho() const {
  if (!is_scalar()) throw std::logic_error("UplinkMessage: rho requested from a full message");
  return rho_;
}

const Payload& UplinkMessage::payload() const {
  if (!payload_) throw std::logic_error("UplinkMessage: payload requested from a scalar message");
  return *payload_;
}

WireCost ledger_cost(const UplinkMessage& msg) {
  return msg.is_scalar() ? WireCost{1.0, kFloatBits} : payload_cost(msg.payload());
}

}  // namespace lbgm
