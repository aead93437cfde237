// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>

namespace lbgm {

Batch Dataset::batch(std::span<const std::size_t> requested) const {
  // Rows are laid out in ascending sample index so that batch gradients do
  // not depend on the order the caller drew them in.
  std::vector<std::size_t> indices(requested.begin(), requested.end());
  std::sort(indices.begin(), indices.end());
  Batch b;
  b.n = indices.size();
  b.input_dim = dim;
  b.inputs.reserve(b.n * dim);
  for (std::size_t idx : indices) {
    if (idx >= n) throw std::out_of_range("Dataset::batch: index " + std::to_string(idx) + " out of range");
    const auto row = inputs.begin() + static_cast<std::ptrdiff_t>(idx * dim);
    b.inputs.insert(b.inputs.end(), row, row + static_cast<std::ptrdiff_t>(dim));
    if (is_classification()) {
      b.labels.push_back(labels[idx]);
    } else {
      const auto t = targets.begin() + static_cast<std::ptrdiff_t>(idx * target_dim);
      b.targets.insert(b.targets.end(), t, t + static_cast<std::ptrdiff_t>(target_dim));
    }
  }
  return b;
}

Batch Dataset::full_batch() const {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return batch(all);
}

Dataset Dataset::slice(std::size_t first, std::size_t count) const {
  if (first + count > n) throw std::out_of_range("Dataset::slice: range exceeds dataset");
  Dataset out = *this;
  out.n = count;
  out.inputs.assign(inputs.begin() + static_cast<std::ptrdiff_t>(first * dim),
                    inputs.begin() + static_cast<std::ptrdiff_t>((first + count) * dim));
  if (is_classification()) {
    out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(first),
                      labels.begin() + static_cast<std::ptrdiff_t>(first + count));
  } else {
    out.targets.assign(targets.begin() + static_cast<std::ptrdiff_t>(first * target_dim),
                       targets.begin() + static_cast<std::ptrdiff_t>((first + count) * target_dim));
  }
  return out;
}

IdxError::IdxError(const std::string& file, std::size_t offset, const std::string& what)
    : std::runtime_error(file + ": " + what + " at byte " + std::to_string(offset)), offset_(offset) {}

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(path.string(), 0, "cannot open file");
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset, const std::string& file) {
  if (offset + 4 > bytes.size()) throw IdxError(file, offset, "truncated header");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  const std::string img_name = images_path.string();
  const std::string lbl_name = labels_path.string();
  const auto img = read_file(images_path);
  const auto lbl = read_file(labels_path);

  if (read_be32(img, 0, img_name) != kIdxImagesMagic) throw IdxError(img_name, 0, "bad magic number");
  if (read_be32(lbl, 0, lbl_name) != kIdxLabelsMagic) throw IdxError(lbl_name, 0, "bad magic number");

  const std::size_t n = read_be32(img, 4, img_name);
  const std::size_t rows = read_be32(img, 8, img_name);
  const std::size_t cols = read_be32(img, 12, img_name);
  const std::size_t n_labels = read_be32(lbl, 4, lbl_name);
  if (n_labels != n) {
    throw IdxError(lbl_name, 4,
                   "label count " + std::to_string(n_labels) + " does not match image count " + std::to_string(n));
  }
  if (n == 0 || rows * cols == 0) throw IdxError(img_name, 4, "empty image set");

  constexpr std::size_t kImgHeader = 16;
  constexpr std::size_t kLblHeader = 8;
  const std::size_t pixels = n * rows * cols;
  if (img.size() < kImgHeader + pixels) throw IdxError(img_name, img.size(), "truncated pixel data");
  if (lbl.size() < kLblHeader + n) throw IdxError(lbl_name, lbl.size(), "truncated label data");

  Dataset ds;
  ds.n = n;
  ds.dim = rows * cols;
  ds.inputs.resize(pixels);
  for (std::size_t i = 0; i < pixels; ++i) ds.inputs[i] = img[kImgHeader + i] / 255.0;
  ds.labels.resize(n);
  int max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ds.labels[i] = lbl[kLblHeader + i];
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.num_classes = static_cast<std::size_t>(max_label) + 1;
  return ds;
}

Dataset synth_classification(std::size_t n, std::size_t dim, std::size_t classes, double separation,
                             RngStream& rng) {
  if (classes < 2) throw std::invalid_argument("synth_classification: need at least 2 classes");
  if (n < classes) throw std::invalid_argument("synth_classification: n must be at least the class count");
  if (dim == 0) throw std::invalid_argument("synth_classification: dim must be positive");

  // Centres at radius separation/sqrt(2). Orthogonal axes give exact pairwise
  // distance `separation`; with fewer axes than classes, random directions.
  const double radius = separation / std::sqrt(2.0);
  std::vector<double> centers(classes * dim, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    double* ctr = &centers[c * dim];
    if (dim >= classes) {
      ctr[c] = radius;
    } else {
      double nrm = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        ctr[j] = rng.normal();
        nrm += ctr[j] * ctr[j];
      }
      nrm = std::sqrt(nrm);
      for (std::size_t j = 0; j < dim; ++j) ctr[j] = nrm > 0.0 ? radius * ctr[j] / nrm : 0.0;
    }
  }

  Dataset ds;
  ds.n = n;
  ds.dim = dim;
  ds.num_classes = classes;
  ds.inputs.resize(n * dim);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;
    ds.labels[i] = static_cast<int>(c);
    for (std::size_t j = 0; j < dim; ++j) ds.inputs[i * dim + j] = centers[c * dim + j] + rng.normal();
  }
  return ds;
}

Dataset synth_regression(std::size_t n, std::size_t dim, std::size_t target_dim, double noise, RngStream& rng) {
  if (n == 0 || dim == 0 || target_dim == 0) throw std::invalid_argument("synth_regression: sizes must be positive");
  std::vector<double> w(target_dim * dim);
  std::vector<double> b(target_dim);
  for (double& v : w) v = rng.normal();
  for (double& v : b) v = rng.normal();

  Dataset ds;
  ds.n = n;
  ds.dim = dim;
  ds.target_dim = target_dim;
  ds.inputs.resize(n * dim);
  ds.targets.resize(n * target_dim);
  for (std::size_t i = 0; i < n; ++i) {
    double* x = &ds.inputs[i * dim];
    for (std::size_t j = 0; j < dim; ++j) x[j] = rng.normal();
    for (std::size_t r = 0; r < target_dim; ++r) {
      double y = b[r];
      for (std::size_t j = 0; j < dim; ++j) y += w[r * dim + j] * x[j];
      ds.targets[i * target_dim + r] = y + noise * rng.normal();
    }
  }
  return ds;
}

namespace {

// Deals `items` into `count` consecutive chunks; earlier chunks absorb the
// remainder one item each.
std::vector<std::vector<std::size_t>> deal(const std::vector<std::size_t>& items, std::size_t count) {
  std::vector<std::vector<std::size_t>> out(count);
  const std::size_t base = items.size() / count;
  const std::size_t extra = items.size() % count;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    out[k].assign(items.begin() + static_cast<std::ptrdiff_t>(pos),
                  items.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return out;
}

}  // namespace

Partition partition(const Dataset& ds, std::size_t workers, PartitionMode mode, std::size_t labels_per_shard,
                    RngStream& rng) {
  if (workers == 0) throw std::invalid_argument("partition: need at least one worker");
  if (workers > ds.n) {
    throw std::invalid_argument("partition: " + std::to_string(workers) + " workers exceed " + std::to_string(ds.n) +
                                " samples");
  }

  Partition part;
  if (mode == PartitionMode::kIid) {
    std::vector<std::size_t> order(ds.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    part.shards = deal(order, workers);
  } else {
    if (!ds.is_classification()) throw std::invalid_argument("partition: label_shard requires class labels");
    const std::size_t classes = ds.num_classes;
    const std::size_t s = labels_per_shard;
    if (s == 0 || s > classes) {
      throw std::invalid_argument("partition: labels per shard must be in [1, " + std::to_string(classes) + "]");
    }
    if (workers * s < classes) {
      throw std::invalid_argument("partition: " + std::to_string(workers) + " workers x " + std::to_string(s) +
                                  " labels cannot cover " + std::to_string(classes) + " classes");
    }
    std::vector<std::vector<std::size_t>> owners(classes);
    for (std::size_t k = 0; k < workers; ++k) {
      for (std::size_t j = 0; j < s; ++j) owners[(k * s + j) % classes].push_back(k);
    }
    std::vector<std::vector<std::size_t>> by_label(classes);
    for (std::size_t i = 0; i < ds.n; ++i) by_label[static_cast<std::size_t>(ds.labels[i])].push_back(i);

    part.shards.assign(workers, {});
    for (std::size_t c = 0; c < classes; ++c) {
      rng.shuffle(by_label[c]);
      const auto chunks = deal(by_label[c], owners[c].size());
      for (std::size_t j = 0; j < owners[c].size(); ++j) {
        auto& shard = part.shards[owners[c][j]];
        shard.insert(shard.end(), chunks[j].begin(), chunks[j].end());
      }
    }
  }

  for (auto& shard : part.shards) std::sort(shard.begin(), shard.end());
  const double total = static_cast<double>(ds.n);
  for (const auto& shard : part.shards) part.weights.push_back(static_cast<double>(shard.size()) / total);
  return part;
}

}  // namespace lbgm
