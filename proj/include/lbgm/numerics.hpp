// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Flat-vector algebra and seeded random streams used by every other module.

#ifndef LBGM_NUMERICS_HPP_
#define LBGM_NUMERICS_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace lbgm {

/// Dense vector of 64-bit floats holding a flattened model, gradient or
/// look-back gradient. Entries are finite after every public operation.
class ParamVector {
 public:
  explicit ParamVector(std::size_t dim);
  explicit ParamVector(std::vector<double> data);
  ParamVector(std::initializer_list<double> values);

  std::size_t dim() const { return data_.size(); }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  bool is_finite() const;
  bool is_zero() const;

  // Elementwise ==; note that this treats -0.0 and 0.0 as equal.
  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> data_;
};

/// True when both vectors have the same dimension and identical bit patterns.
bool bit_equal(const ParamVector& a, const ParamVector& b);

double dot(const ParamVector& a, const ParamVector& b);
double norm_sq(const ParamVector& a);
double norm(const ParamVector& a);

/// dot(a,b)/(|a||b|) clamped to [-1, 1]. Throws std::domain_error when
/// either input has zero norm.
double cosine_sim(const ParamVector& a, const ParamVector& b);

/// Returns y + alpha * x.
ParamVector axpy(double alpha, const ParamVector& x, const ParamVector& y);

ParamVector scale(double alpha, const ParamVector& x);

void require_same_dim(const ParamVector& a, const ParamVector& b, const char* op);

// Stream ids >= 2^32 are reserved for non-worker roles so that worker
// indices never collide with them.
namespace stream_tag {
inline constexpr std::uint64_t kServer = 1ULL << 32;
inline constexpr std::uint64_t kInit = kServer + 1;
inline constexpr std::uint64_t kData = kServer + 2;
inline constexpr std::uint64_t kPartition = kServer + 3;
inline constexpr std::uint64_t kCentral = kServer + 4;
}  // namespace stream_tag

/// Deterministic random stream identified by (master_seed, stream_id).
/// Satisfies UniformRandomBitGenerator so it can drive <random> and
/// <algorithm> facilities directly.
class RngStream {
 public:
  using result_type = std::mt19937_64::result_type;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform on [lo, hi).
  double uniform(double lo = 0.0, double hi = 1.0);
  double normal(double mean = 0.0, double stddev = 1.0);

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    std::shuffle(items.begin(), items.end(), *this);
  }

  /// `count` distinct indices from [0, n), returned in ascending order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace lbgm

#endif  // LBGM_NUMERICS_HPP_
