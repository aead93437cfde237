// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/numerics.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lbgm {

namespace {

void require_finite(const std::vector<double>& data, const char* op) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw std::domain_error(std::string(op) + ": non-finite entry at index " + std::to_string(i));
    }
  }
}

}  // namespace

ParamVector::ParamVector(std::size_t dim) : data_(dim, 0.0) {}

ParamVector::ParamVector(std::vector<double> data) : data_(std::move(data)) {
  require_finite(data_, "ParamVector");
}

ParamVector::ParamVector(std::initializer_list<double> values) : data_(values) {
  require_finite(data_, "ParamVector");
}

bool ParamVector::is_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

bool ParamVector::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

bool bit_equal(const ParamVector& a, const ParamVector& b) {
  return a.dim() == b.dim() &&
         std::memcmp(a.raw().data(), b.raw().data(), a.dim() * sizeof(double)) == 0;
}

void require_same_dim(const ParamVector& a, const ParamVector& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

double dot(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b, "dot");
  // Left-to-right accumulation; std::inner_product is specified sequential.
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm_sq(const ParamVector& a) { return dot(a, a); }

double norm(const ParamVector& a) { return std::sqrt(norm_sq(a)); }

double cosine_sim(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b, "cosine_sim");
  const double na2 = norm_sq(a);
  const double nb2 = norm_sq(b);
  if (na2 == 0.0 || nb2 == 0.0) {
    throw std::domain_error("cosine_sim: zero-norm input");
  }
  // sqrt(fl(s*s)) == s in binary floating point, so cosine_sim(a, a) is
  // exactly 1 whenever the product does not overflow.
  const double denom_sq = na2 * nb2;
  const double denom = std::isfinite(denom_sq) ? std::sqrt(denom_sq) : std::sqrt(na2) * std::sqrt(nb2);
  const double c = dot(a, b) / denom;
  return std::clamp(c, -1.0, 1.0);
}

ParamVector axpy(double alpha, const ParamVector& x, const ParamVector& y) {
  require_same_dim(x, y, "axpy");
  std::vector<double> out(y.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = y[i] + alpha * x[i];
  }
  return ParamVector(std::move(out));
}

ParamVector scale(double alpha, const ParamVector& x) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = alpha * x[i];
  }
  return ParamVector(std::move(out));
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double RngStream::normal(double mean, double stddev) {
  return std::normal_distribution<double>(mean, stddev)(engine_);
}

std::vector<std::size_t> RngStream::sample_without_replacement(std::size_t n, std::size_t count) {
  if (count > n) {
    throw std::invalid_argument("sample_without_replacement: count exceeds population");
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  shuffle(pool);
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace lbgm
