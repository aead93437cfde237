// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/payloads.hpp"

#include <stdexcept>

namespace lbgm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::size_t payload_dim(const Payload& payload) {
  return std::visit(Overloaded{
                        [](const ParamVector& p) { return p.dim(); },
                        [](const SparsePayload& p) { return p.dim; },
                        [](const SignPayload& p) { return p.signs.size(); },
                        [](const LowRankPayload& p) { return p.dim; },
                    },
                    payload);
}

ParamVector densify(const Payload& payload) {
  return std::visit(
      Overloaded{
          [](const ParamVector& p) { return p; },
          [](const SparsePayload& p) {
            ParamVector out(p.dim);
            for (std::size_t i = 0; i < p.indices.size(); ++i) out[p.indices[i]] = p.values[i];
            return out;
          },
          [](const SignPayload& p) {
            ParamVector out(p.signs.size());
            for (std::size_t i = 0; i < p.signs.size(); ++i) out[i] = p.signs[i] ? 1.0 : -1.0;
            return out;
          },
          [](const LowRankPayload& p) {
            std::vector<double> out;
            out.reserve(p.dim);
            for (const auto& b : p.blocks) {
              if (b.rank == 0) {
                out.insert(out.end(), b.dense.begin(), b.dense.end());
                continue;
              }
              for (std::size_t r = 0; r < b.shape.rows; ++r) {
                for (std::size_t c = 0; c < b.shape.cols; ++c) {
                  double acc = 0.0;
                  for (std::size_t j = 0; j < b.rank; ++j) acc += b.left[r * b.rank + j] * b.right[c * b.rank + j];
                  out.push_back(acc);
                }
              }
            }
            if (out.size() != p.dim) throw std::logic_error("densify: low-rank blocks do not cover the vector");
            return ParamVector(std::move(out));
          },
      },
      payload);
}

WireCost payload_cost(const Payload& payload) {
  return std::visit(Overloaded{
                        [](const ParamVector& p) {
                          return WireCost{static_cast<double>(p.dim()), kFloatBits * p.dim()};
                        },
                        [](const SparsePayload& p) {
                          const std::uint64_t k = p.indices.size();
                          return WireCost{2.0 * static_cast<double>(k), 2 * kFloatBits * k};
                        },
                        [](const SignPayload& p) {
                          const std::uint64_t m = p.signs.size();
                          return WireCost{static_cast<double>(m) / static_cast<double>(kFloatBits), m};
                        },
                        [](const LowRankPayload& p) {
                          std::uint64_t floats = 0;
                          for (const auto& b : p.blocks) {
                            floats += b.rank == 0 ? b.dense.size() : b.rank * (b.shape.rows + b.shape.cols);
                          }
                          return WireCost{static_cast<double>(floats), kFloatBits * floats};
                        },
                    },
                    payload);
}

}  // namespace lbgm
