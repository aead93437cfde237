// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/lbgm.hpp"

#include <stdexcept>
#include <string>

namespace lbgm {

void validate(const LbgmConfig& cfg) {
  if (!(cfg.delta_threshold >= 0.0 && cfg.delta_threshold <= 1.0)) {
    throw std::invalid_argument("LbgmConfig: delta_threshold must lie in [0, 1]");
  }
}

double lbp_error(const ParamVector& g, const ParamVector& lbg) {
  require_same_dim(g, lbg, "lbp_error");
  if (g.is_zero()) return 0.0;
  if (lbg.is_zero()) return 1.0;
  const double c = cosine_sim(g, lbg);
  return 1.0 - c * c;
}

double lbc(const ParamVector& g, const ParamVector& lbg) {
  require_same_dim(g, lbg, "lbc");
  const double denom = norm_sq(lbg);
  if (denom == 0.0) throw std::domain_error("lbc: look-back gradient has zero norm");
  return dot(g, lbg) / denom;
}

UplinkMessage decide_payload(const Payload& current, std::optional<ParamVector>& lbg, const LbgmConfig& cfg) {
  ParamVector g = densify(current);
  const auto send_full = [&] {
    lbg = std::move(g);
    return UplinkMessage::full(current);
  };

  if (!lbg) return send_full();
  require_same_dim(g, *lbg, "decide_message");
  if (g.is_zero()) return UplinkMessage::scalar(0.0);
  if (lbg->is_zero()) return send_full();

  const double err = lbp_error(g, *lbg);
  if (err <= cfg.delta_threshold) {
    return UplinkMessage::scalar(lbc(g, *lbg), norm_sq(g) * err);
  }
  return send_full();
}

UplinkMessage decide_message(const ParamVector& g, std::optional<ParamVector>& lbg, const LbgmConfig& cfg) {
  return decide_payload(Payload(g), lbg, cfg);
}

ParamVector reconstruct(ServerState& server, std::size_t worker_id, const UplinkMessage& msg) {
  if (msg.is_scalar()) {
    const auto it = server.lbg_copies.find(worker_id);
    if (it == server.lbg_copies.end()) {
      throw std::logic_error("reconstruct: scalar LBC from worker " + std::to_string(worker_id) +
                             " without a stored look-back gradient");
    }
    return scale(msg.rho(), it->second);
  }
  ParamVector g = densify(msg.payload());
  server.lbg_copies.insert_or_assign(worker_id, g);
  return g;
}

}  // namespace lbgm
