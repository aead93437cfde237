// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Gradient-space analysis of centralized training. One accumulated gradient
// is logged per epoch; the log is stacked as a T x M matrix whose singular
// values and right singular vectors give the number of principal components
// and the principal gradient directions (PGDs).

#ifndef LBGM_ANALYZER_HPP_
#define LBGM_ANALYZER_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lbgm/data.hpp"
#include "lbgm/models.hpp"
#include "lbgm/numerics.hpp"

namespace lbgm {

struct GradientLog {
  std::vector<ParamVector> grads;  // epoch order

  std::size_t size() const { return grads.size(); }
  /// The same log restricted to coordinates [offset, offset + length).
  GradientLog slice(std::size_t offset, std::size_t length) const;
  /// The log restricted to block `index` of a flattened model.
  GradientLog layer(std::span<const LayerShape> shapes, std::size_t index) const;
};

struct PcaOptions {
  /// false: cumulative mass of singular values (the default).
  /// true: classical explained variance on squared singular values.
  bool squared = false;
};

/// Singular values of the stacked log, descending. Values below
/// max(T, M) * eps * sigma_1 are set to zero.
std::vector<double> singular_values(const GradientLog& log);

/// Smallest c whose leading singular values carry at least `variance` of
/// the total mass. Zero logs report 0 components.
std::size_t n_pca(const GradientLog& log, double variance, const PcaOptions& opts = {});

/// The first n_pca(log, variance) right singular vectors, unit norm, each
/// signed so its first nonzero coordinate is positive.
std::vector<ParamVector> pgd(const GradientLog& log, double variance, const PcaOptions& opts = {});

/// Row-major dense matrix.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Entry (i, j) = cosine_sim(grads[i], pgds[j]). Zero gradients give a
/// zero row; their count is returned through `zero_rows` when non-null.
Matrix overlap_matrix(const GradientLog& log, std::span<const ParamVector> pgds, std::size_t* zero_rows = nullptr);

/// Symmetric cosine similarity among logged gradients; zero gradients
/// produce zero rows and columns.
Matrix similarity_matrix(const GradientLog& log);

struct CentralizedRecord {
  GradientLog log;
  std::vector<std::size_t> n95;  // per-epoch progression over log prefixes
  std::vector<std::size_t> n99;
  ParamVector theta_final;
};

/// Centralized minibatch SGD for `epochs` passes over the dataset. Each
/// epoch's minibatch gradients are summed into one logged gradient, and the
/// N95/N99 counts are recomputed over the growing log after every epoch.
CentralizedRecord record_centralized(const Model& model, const Dataset& dataset, const ParamVector& theta0,
                                     std::size_t epochs, double eta, std::size_t batch_size, RngStream& rng,
                                     const PcaOptions& opts = {});

std::string matrix_to_csv(const Matrix& m);
std::string npca_to_csv(const CentralizedRecord& record);

}  // namespace lbgm

#endif  // LBGM_ANALYZER_HPP_
