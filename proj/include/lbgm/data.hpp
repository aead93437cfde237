// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Datasets, IDX loading, synthetic generators and worker partitioning.

#ifndef LBGM_DATA_HPP_
#define LBGM_DATA_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbgm/models.hpp"
#include "lbgm/numerics.hpp"

namespace lbgm {

/// n samples of dimension `dim`. Classification sets use `labels` and
/// num_classes > 0; regression sets use `targets` (n x target_dim) and
/// num_classes == 0.
struct Dataset {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  std::size_t target_dim = 0;
  std::vector<double> inputs;
  std::vector<int> labels;
  std::vector<double> targets;

  bool is_classification() const { return num_classes > 0; }

  /// Gathers the given rows, in the given order, into a Batch.
  Batch batch(std::span<const std::size_t> indices) const;
  Batch full_batch() const;
  /// Rows [first, first + count) as a new dataset.
  Dataset slice(std::size_t first, std::size_t count) const;
};

class IdxError : public std::runtime_error {
 public:
  IdxError(const std::string& file, std::size_t offset, const std::string& what);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Reads an IDX image/label file pair. Pixels are scaled to [0, 1].
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

/// Isotropic unit-variance Gaussian blobs, one per class, with pairwise
/// centre distance `separation` when dim >= classes. Labels cycle through
/// the classes so every class has floor(n/classes) or one more samples.
Dataset synth_classification(std::size_t n, std::size_t dim, std::size_t classes, double separation,
                             RngStream& rng);

/// y = W x + b + noise with W, b drawn from the stream and x ~ N(0, I).
Dataset synth_regression(std::size_t n, std::size_t dim, std::size_t target_dim, double noise, RngStream& rng);

enum class PartitionMode { kIid, kLabelShard };

struct Partition {
  std::vector<std::vector<std::size_t>> shards;  // ascending index lists
  std::vector<double> weights;                   // n_k / N

  std::size_t workers() const { return shards.size(); }
};

/// kIid: shuffled equal split. kLabelShard: worker k owns labels
/// (k*s + j) mod C for j < s, and each label's samples are dealt evenly
/// across the workers that own it. Earlier shards absorb uneven residues.
Partition partition(const Dataset& ds, std::size_t workers, PartitionMode mode, std::size_t labels_per_shard,
                    RngStream& rng);

}  // namespace lbgm

#endif  // LBGM_DATA_HPP_
