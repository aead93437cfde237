// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/compressors.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lbgm {

SparsePayload topk(const ParamVector& g, std::size_t k) {
  if (k < 1 || k > g.dim()) {
    throw std::invalid_argument("topk: k = " + std::to_string(k) + " outside [1, " + std::to_string(g.dim()) + "]");
  }
  std::vector<std::size_t> order(g.dim());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Strict total order, so the selected set is unique.
  const auto before = [&g](std::size_t a, std::size_t b) {
    const double ma = std::abs(g[a]);
    const double mb = std::abs(g[b]);
    return ma != mb ? ma > mb : a < b;
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), before);
  order.resize(k);
  std::sort(order.begin(), order.end());

  SparsePayload out;
  out.dim = g.dim();
  out.indices = std::move(order);
  out.values.reserve(k);
  for (std::size_t i : out.indices) out.values.push_back(g[i]);
  return out;
}

SignPayload sign_compress(const ParamVector& g) {
  SignPayload out;
  out.signs.resize(g.dim());
  for (std::size_t i = 0; i < g.dim(); ++i) out.signs[i] = g[i] >= 0.0;
  return out;
}

LowRankPayload rank_r(const ParamVector& g, std::span<const LayerShape> layer_shapes, std::size_t r) {
  if (r < 1) throw std::invalid_argument("rank_r: rank must be at least 1");
  std::size_t total = 0;
  for (const auto& s : layer_shapes) total += s.size();
  if (total != g.dim()) throw std::invalid_argument("rank_r: layer shapes do not partition the vector");

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  LowRankPayload out;
  out.dim = g.dim();
  out.rank = r;
  std::size_t offset = 0;
  for (const auto& shape : layer_shapes) {
    LowRankBlock block;
    block.shape = shape;
    const double* data = g.raw().data() + offset;
    if (shape.bias || !shape.is_matrix()) {
      block.dense.assign(data, data + shape.size());
    } else {
      const Eigen::Map<const RowMajor> mat(data, static_cast<Eigen::Index>(shape.rows),
                                           static_cast<Eigen::Index>(shape.cols));
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const std::size_t rank = std::min({r, shape.rows, shape.cols});
      block.rank = rank;
      block.left.assign(shape.rows * rank, 0.0);
      block.right.assign(shape.cols * rank, 0.0);
      const auto& u = svd.matrixU();
      const auto& v = svd.matrixV();
      const auto& sigma = svd.singularValues();
      for (std::size_t j = 0; j < rank; ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        double sign = 1.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
          if (std::abs(u(i, col)) > 1e-12) {
            sign = u(i, col) < 0.0 ? -1.0 : 1.0;
            break;
          }
        }
        for (std::size_t i = 0; i < shape.rows; ++i) {
          block.left[i * rank + j] = sign * sigma(col) * u(static_cast<Eigen::Index>(i), col);
        }
        for (std::size_t i = 0; i < shape.cols; ++i) {
          block.right[i * rank + j] = sign * v(static_cast<Eigen::Index>(i), col);
        }
      }
    }
    out.blocks.push_back(std::move(block));
    offset += shape.size();
  }
  return out;
}

ErrorFeedbackResult ef_wrap(const ParamVector& residual, const ParamVector& g, const CompressFn& compress) {
  require_same_dim(residual, g, "ef_wrap");
  ParamVector corrected = axpy(1.0, residual, g);
  Payload payload = compress(corrected);
  const ParamVector sent = densify(payload);
  require_same_dim(sent, corrected, "ef_wrap");
  std::vector<double> next(g.dim());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] = corrected[i] - sent[i];
  return {std::move(payload), ParamVector(std::move(next))};
}

UplinkMessage stack_lbgm(const Payload& compressed_g, std::optional<ParamVector>& compressed_lbg,
                         const LbgmConfig& cfg) {
  return decide_payload(compressed_g, compressed_lbg, cfg);
}

}  // namespace lbgm
