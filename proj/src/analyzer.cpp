// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/analyzer.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lbgm/metrics.hpp"

namespace lbgm {

GradientLog GradientLog::slice(std::size_t offset, std::size_t length) const {
  GradientLog out;
  for (const auto& g : grads) {
    if (offset + length > g.dim()) throw std::out_of_range("GradientLog::slice: range exceeds dimension");
    out.grads.emplace_back(std::vector<double>(g.begin() + static_cast<std::ptrdiff_t>(offset),
                                               g.begin() + static_cast<std::ptrdiff_t>(offset + length)));
  }
  return out;
}

GradientLog GradientLog::layer(std::span<const LayerShape> shapes, std::size_t index) const {
  if (index >= shapes.size()) throw std::out_of_range("GradientLog::layer: no such layer");
  std::size_t offset = 0;
  for (std::size_t i = 0; i < index; ++i) offset += shapes[i].size();
  return slice(offset, shapes[index].size());
}

namespace {

Matrix stack(const GradientLog& log) {
  if (log.grads.empty()) throw std::invalid_argument("gradient log is empty");
  const std::size_t dim = log.grads.front().dim();
  Matrix m(static_cast<Eigen::Index>(log.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log.grads[i].dim() != dim) throw std::invalid_argument("gradient log has mixed dimensions");
    for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = log.grads[i][j];
  }
  return m;
}

void zero_negligible(Eigen::VectorXd& sigma, const Matrix& m) {
  if (sigma.size() == 0) return;
  const double tol = static_cast<double>(std::max(m.rows(), m.cols())) * std::numeric_limits<double>::epsilon() *
                     sigma(0);
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) <= tol) sigma(i) = 0.0;
  }
}

std::size_t count_components(const Eigen::VectorXd& sigma, double variance, const PcaOptions& opts) {
  if (!(variance > 0.0 && variance <= 1.0)) throw std::invalid_argument("n_pca: variance must lie in (0, 1]");
  std::vector<double> mass(static_cast<std::size_t>(sigma.size()));
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double s = sigma(static_cast<Eigen::Index>(i));
    mass[i] = opts.squared ? s * s : s;
  }
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (total == 0.0) return 0;
  // Relative slack absorbs round-off when the target sits exactly on a
  // partial sum, e.g. 19 equal values out of 20 at 95%.
  const double target = variance * total * (1.0 - 1e-12);
  double cum = 0.0;
  for (std::size_t c = 0; c < mass.size(); ++c) {
    cum += mass[c];
    if (cum >= target) return c + 1;
  }
  return mass.size();
}

}  // namespace

std::vector<double> singular_values(const GradientLog& log) {
  const Matrix m = stack(log);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  Eigen::VectorXd sigma = svd.singularValues();
  zero_negligible(sigma, m);
  return std::vector<double>(sigma.data(), sigma.data() + sigma.size());
}

std::size_t n_pca(const GradientLog& log, double variance, const PcaOptions& opts) {
  const auto sv = singular_values(log);
  const Eigen::VectorXd sigma = Eigen::Map<const Eigen::VectorXd>(sv.data(), static_cast<Eigen::Index>(sv.size()));
  return count_components(sigma, variance, opts);
}

std::vector<ParamVector> pgd(const GradientLog& log, double variance, const PcaOptions& opts) {
  const Matrix m = stack(log);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
  Eigen::VectorXd sigma = svd.singularValues();
  zero_negligible(sigma, m);
  const std::size_t count = count_components(sigma, variance, opts);
  const auto& v = svd.matrixV();
  std::vector<ParamVector> out;
  for (std::size_t j = 0; j < count; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    std::vector<double> dir(static_cast<std::size_t>(v.rows()));
    double sign = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (sign == 0.0 && std::abs(v(i, col)) > 1e-12) sign = v(i, col) < 0.0 ? -1.0 : 1.0;
    }
    if (sign == 0.0) sign = 1.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) dir[static_cast<std::size_t>(i)] = sign * v(i, col);
    out.emplace_back(std::move(dir));
  }
  return out;
}

Matrix overlap_matrix(const GradientLog& log, std::span<const ParamVector> pgds, std::size_t* zero_rows) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(log.size()), static_cast<Eigen::Index>(pgds.size()));
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log.grads[i].is_zero()) {
      ++zeros;
      continue;
    }
    for (std::size_t j = 0; j < pgds.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cosine_sim(log.grads[i], pgds[j]);
    }
  }
  if (zeros > 0) std::clog << "overlap_matrix: " << zeros << " zero-norm gradient(s) left as zero rows\n";
  if (zero_rows) *zero_rows = zeros;
  return out;
}

Matrix similarity_matrix(const GradientLog& log) {
  const auto n = static_cast<Eigen::Index>(log.size());
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log.grads[i].is_zero()) continue;
    for (std::size_t j = i; j < log.size(); ++j) {
      if (log.grads[j].is_zero()) continue;
      const double c = cosine_sim(log.grads[i], log.grads[j]);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = c;
    }
  }
  return out;
}

CentralizedRecord record_centralized(const Model& model, const Dataset& dataset, const ParamVector& theta0,
                                     std::size_t epochs, double eta, std::size_t batch_size, RngStream& rng,
                                     const PcaOptions& opts) {
  if (batch_size == 0) throw std::invalid_argument("record_centralized: batch_size must be positive");
  if (!(eta > 0.0)) throw std::invalid_argument("record_centralized: eta must be positive");
  CentralizedRecord rec{{}, {}, {}, theta0};
  std::vector<std::size_t> order(dataset.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t t = 0; t < epochs; ++t) {
    rng.shuffle(order);
    ParamVector accumulated(model.param_dim());
    for (std::size_t start = 0; start < dataset.n; start += batch_size) {
      const std::size_t end = std::min(start + batch_size, dataset.n);
      std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(idx.begin(), idx.end());
      const ParamVector g = gradient(model, rec.theta_final, dataset.batch(idx));
      rec.theta_final = axpy(-eta, g, rec.theta_final);
      accumulated = axpy(1.0, g, accumulated);
    }
    rec.log.grads.push_back(std::move(accumulated));
    rec.n95.push_back(n_pca(rec.log, 0.95, opts));
    rec.n99.push_back(n_pca(rec.log, 0.99, opts));
  }
  return rec;
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string npca_to_csv(const CentralizedRecord& record) {
  std::string out = "epoch,n95,n99\n";
  for (std::size_t t = 0; t < record.n95.size(); ++t) {
    out += std::to_string(t + 1) + ',' + std::to_string(record.n95[t]) + ',' + std::to_string(record.n99[t]) + '\n';
  }
  return out;
}

}  // namespace lbgm
