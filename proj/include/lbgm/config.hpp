// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration and its line-oriented text format:
//
//   # comment
//   algorithm = lbgm
//   [model]
//   kind = mlp1h
//   [train]
//   rounds = 200
//
// Keys before the first section header are top-level. Unknown keys,
// unknown sections and repeated keys are errors.

#ifndef LBGM_CONFIG_HPP_
#define LBGM_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbgm/data.hpp"
#include "lbgm/lbgm.hpp"
#include "lbgm/models.hpp"

namespace lbgm {

enum class Algorithm {
  kVanilla,
  kLbgm,
  kLbgmSampled,
  kTopK,
  kTopKLbgm,
  kRankR,
  kRankRLbgm,
  kSign,
  kSignLbgm,
  kCentralizedAnalyze,
};

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

enum class DataSource { kSynthetic, kSyntheticRegression, kIdx };
enum class EtaRule { kConstant, kInvSqrtTauT };
enum class SignRule { kMean, kMajority };

struct ModelSpec {
  ModelKind kind = ModelKind::kMlp1h;
  std::size_t hidden = 64;
};

struct DataSpec {
  DataSource source = DataSource::kSynthetic;
  std::size_t n_train = 3000;
  std::size_t n_test = 1000;
  std::size_t dim = 20;
  std::size_t classes = 10;
  double separation = 3.0;
  double noise = 0.1;  // synthetic_regression only
  std::size_t target_dim = 1;
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  std::size_t max_train = 0;  // 0 keeps every IDX sample
  std::size_t max_test = 0;
  std::size_t workers = 10;
  PartitionMode partition = PartitionMode::kIid;
  std::size_t shard_labels = 3;
};

struct TrainSpec {
  std::size_t rounds = 200;
  std::size_t tau = 0;  // 0 means one pass over the largest shard
  double eta = 0.05;
  EtaRule eta_rule = EtaRule::kConstant;
  std::size_t batch_size = 32;
  double sample_fraction = 1.0;
  std::uint64_t seed = 0;
};

struct CompressSpec {
  double k_frac = 0.1;
  std::size_t rank = 2;
  bool error_feedback = true;  // top-K only
  SignRule sign_rule = SignRule::kMean;
};

struct AnalyzeSpec {
  bool squared = false;  // classical explained variance on sigma^2
  long layer = -1;       // -1 analyses the whole vector, else one layer block
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kVanilla;
  std::string out_dir = "out";
  std::string baseline_metrics;
  ModelSpec model;
  DataSpec data;
  TrainSpec train;
  LbgmConfig lbgm;
  CompressSpec compress;
  AnalyzeSpec analyze;
};

class ConfigError : public std::runtime_error {
 public:
  /// line == 0 marks command-line overrides or whole-document checks.
  ConfigError(const std::string& key, std::size_t line, const std::string& what);
  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

/// Parses and validates a config document. Each override has the form
/// `section.key=value` (or `key=value` for top-level keys) and replaces
/// the value from the document.
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Cross-field checks; parse_config calls this.
void validate(const ExperimentConfig& cfg);

}  // namespace lbgm

#endif  // LBGM_CONFIG_HPP_
