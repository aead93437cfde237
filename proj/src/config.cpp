// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace lbgm {

namespace {

const std::vector<std::pair<Algorithm, std::string>>& algorithm_names() {
  static const std::vector<std::pair<Algorithm, std::string>> names = {
      {Algorithm::kVanilla, "vanilla"},
      {Algorithm::kLbgm, "lbgm"},
      {Algorithm::kLbgmSampled, "lbgm_sampled"},
      {Algorithm::kTopK, "topk"},
      {Algorithm::kTopKLbgm, "topk_lbgm"},
      {Algorithm::kRankR, "rank_r"},
      {Algorithm::kRankRLbgm, "rank_r_lbgm"},
      {Algorithm::kSign, "sign"},
      {Algorithm::kSignLbgm, "sign_lbgm"},
      {Algorithm::kCentralizedAnalyze, "centralized_analyze"},
  };
  return names;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  std::size_t line;
};

// "section.key" -> entry; top-level keys have no prefix.
using EntryMap = std::map<std::string, Entry>;

const std::set<std::string> kSections = {"model", "data", "train", "lbgm", "compress", "analyze"};

EntryMap tokenize(const std::string& text) {
  EntryMap entries;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line, line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section)) throw ConfigError(section, line_no, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(key, line_no, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (entries.count(full)) {
      throw ConfigError(full, line_no, "duplicate key (first set on line " + std::to_string(entries[full].line) + ")");
    }
    entries[full] = {value, line_no};
  }
  return entries;
}

class Reader {
 public:
  explicit Reader(EntryMap entries) : entries_(std::move(entries)) {}

  template <typename T, typename Parse>
  void read(const std::string& key, T& field, Parse parse) {
    const auto it = entries_.find(key);
    consumed_.insert(key);
    if (it == entries_.end()) return;
    try {
      field = parse(it->second.value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(key, it->second.line, e.what());
    }
  }

  std::size_t line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  void reject_unknown() const {
    for (const auto& [key, entry] : entries_) {
      if (!consumed_.count(key)) throw ConfigError(key, entry.line, "unknown key");
    }
  }

 private:
  EntryMap entries_;
  std::set<std::string> consumed_;
};

std::size_t parse_size(const std::string& v) {
  std::size_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

long parse_long(const std::string& v) {
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw std::invalid_argument("expected an unsigned integer, got '" + v + "'");
  }
  return out;
}

double parse_real(const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("expected a finite number, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

std::string parse_string(const std::string& v) { return v; }

void require(bool ok, const std::string& key, const Reader& reader, const std::string& what) {
  if (!ok) throw ConfigError(key, reader.line_of(key), what);
}

}  // namespace

ConfigError::ConfigError(const std::string& key, std::size_t line, const std::string& what)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + "key '" + key +
                         "': " + what),
      key_(key),
      line_(line) {}

std::string to_string(Algorithm algorithm) {
  for (const auto& [a, name] : algorithm_names()) {
    if (a == algorithm) return name;
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  for (const auto& [a, n] : algorithm_names()) {
    if (n == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  EntryMap entries = tokenize(text);
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError(ov, 0, "override must look like key=value");
    const std::string key = trim(ov.substr(0, eq));
    const auto dot = key.find('.');
    if (dot != std::string::npos && !kSections.count(key.substr(0, dot))) {
      throw ConfigError(key, 0, "unknown section in override");
    }
    entries[key] = {trim(ov.substr(eq + 1)), 0};
  }

  Reader r(std::move(entries));
  ExperimentConfig cfg;
  require(r.has("algorithm"), "algorithm", r, "missing required key");
  r.read("algorithm", cfg.algorithm, algorithm_from_string);
  r.read("out", cfg.out_dir, parse_string);
  r.read("baseline_metrics", cfg.baseline_metrics, parse_string);

  r.read("model.kind", cfg.model.kind, model_kind_from_string);
  r.read("model.hidden", cfg.model.hidden, parse_size);

  r.read("data.source", cfg.data.source, [](const std::string& v) {
    if (v == "synthetic") return DataSource::kSynthetic;
    if (v == "synthetic_regression") return DataSource::kSyntheticRegression;
    if (v == "idx") return DataSource::kIdx;
    throw std::invalid_argument("unknown data source '" + v + "'");
  });
  r.read("data.n_train", cfg.data.n_train, parse_size);
  r.read("data.n_test", cfg.data.n_test, parse_size);
  r.read("data.dim", cfg.data.dim, parse_size);
  r.read("data.classes", cfg.data.classes, parse_size);
  r.read("data.separation", cfg.data.separation, parse_real);
  r.read("data.noise", cfg.data.noise, parse_real);
  r.read("data.target_dim", cfg.data.target_dim, parse_size);
  r.read("data.train_images", cfg.data.train_images, parse_string);
  r.read("data.train_labels", cfg.data.train_labels, parse_string);
  r.read("data.test_images", cfg.data.test_images, parse_string);
  r.read("data.test_labels", cfg.data.test_labels, parse_string);
  r.read("data.max_train", cfg.data.max_train, parse_size);
  r.read("data.max_test", cfg.data.max_test, parse_size);
  r.read("data.workers", cfg.data.workers, parse_size);
  r.read("data.partition", cfg.data.partition, [](const std::string& v) {
    if (v == "iid") return PartitionMode::kIid;
    if (v == "label_shard") return PartitionMode::kLabelShard;
    throw std::invalid_argument("unknown partition mode '" + v + "'");
  });
  r.read("data.shard_labels", cfg.data.shard_labels, parse_size);

  r.read("train.rounds", cfg.train.rounds, parse_size);
  r.read("train.tau", cfg.train.tau, parse_size);
  r.read("train.eta", cfg.train.eta, parse_real);
  r.read("train.eta_rule", cfg.train.eta_rule, [](const std::string& v) {
    if (v == "constant") return EtaRule::kConstant;
    if (v == "inv_sqrt_tau_t") return EtaRule::kInvSqrtTauT;
    throw std::invalid_argument("unknown eta rule '" + v + "'");
  });
  r.read("train.batch_size", cfg.train.batch_size, parse_size);
  r.read("train.sample_fraction", cfg.train.sample_fraction, parse_real);
  r.read("train.seed", cfg.train.seed, parse_u64);

  r.read("lbgm.delta", cfg.lbgm.delta_threshold, parse_real);
  r.read("lbgm.monitor_delta_sq", cfg.lbgm.monitor_delta_sq, parse_bool);

  r.read("compress.k_frac", cfg.compress.k_frac, parse_real);
  r.read("compress.rank", cfg.compress.rank, parse_size);
  r.read("compress.error_feedback", cfg.compress.error_feedback, parse_bool);
  r.read("compress.sign_rule", cfg.compress.sign_rule, [](const std::string& v) {
    if (v == "mean") return SignRule::kMean;
    if (v == "majority") return SignRule::kMajority;
    throw std::invalid_argument("unknown sign rule '" + v + "'");
  });

  r.read("analyze.squared", cfg.analyze.squared, parse_bool);
  r.read("analyze.layer", cfg.analyze.layer, parse_long);

  r.reject_unknown();

  // Range checks name the key and its line.
  const auto check = [&r](bool ok, const std::string& key, const std::string& what) { require(ok, key, r, what); };
  check(cfg.lbgm.delta_threshold >= 0.0 && cfg.lbgm.delta_threshold <= 1.0, "lbgm.delta", "must lie in [0, 1]");
  check(cfg.compress.k_frac > 0.0 && cfg.compress.k_frac <= 1.0, "compress.k_frac", "must lie in (0, 1]");
  check(cfg.compress.rank >= 1, "compress.rank", "must be at least 1");
  check(cfg.train.eta > 0.0, "train.eta", "must be positive");
  check(cfg.train.batch_size >= 1, "train.batch_size", "must be at least 1");
  check(cfg.train.sample_fraction > 0.0 && cfg.train.sample_fraction <= 1.0, "train.sample_fraction",
        "must lie in (0, 1]");
  check(cfg.data.workers >= 1, "data.workers", "must be at least 1");
  check(cfg.data.dim >= 1, "data.dim", "must be at least 1");
  check(cfg.data.n_train >= 1, "data.n_train", "must be at least 1");
  check(cfg.data.n_test >= 1, "data.n_test", "must be at least 1");
  check(cfg.data.separation >= 0.0, "data.separation", "must be non-negative");
  check(cfg.data.noise >= 0.0, "data.noise", "must be non-negative");
  check(cfg.model.hidden >= 1, "model.hidden", "must be at least 1");
  check(cfg.analyze.layer >= -1, "analyze.layer", "must be -1 or a layer index");
  if (cfg.data.source == DataSource::kIdx) {
    for (const char* key : {"data.train_images", "data.train_labels", "data.test_images", "data.test_labels"}) {
      check(r.has(key), key, "missing required key for source = idx");
    }
  } else if (cfg.data.source == DataSource::kSynthetic) {
    check(cfg.data.classes >= 2, "data.classes", "must be at least 2");
    check(cfg.data.n_train >= cfg.data.classes, "data.n_train", "must be at least the class count");
  }
  const bool regression = cfg.data.source == DataSource::kSyntheticRegression;
  if (regression != (cfg.model.kind == ModelKind::kLinearRegression)) {
    check(false, "model.kind", "linear_regression pairs with source = synthetic_regression and vice versa");
  }
  if (cfg.data.partition == PartitionMode::kLabelShard) {
    check(!regression, "data.partition", "label_shard needs a classification dataset");
    check(cfg.data.shard_labels >= 1, "data.shard_labels", "must be at least 1");
  }
  validate(cfg);
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  validate(cfg.lbgm);
  if (!(cfg.train.eta > 0.0)) throw ConfigError("train.eta", 0, "must be positive");
  if (cfg.data.workers == 0) throw ConfigError("data.workers", 0, "must be at least 1");
  if (cfg.train.batch_size == 0) throw ConfigError("train.batch_size", 0, "must be at least 1");
  if (!(cfg.train.sample_fraction > 0.0 && cfg.train.sample_fraction <= 1.0)) {
    throw ConfigError("train.sample_fraction", 0, "must lie in (0, 1]");
  }
  if (!(cfg.compress.k_frac > 0.0 && cfg.compress.k_frac <= 1.0)) {
    throw ConfigError("compress.k_frac", 0, "must lie in (0, 1]");
  }
  if (cfg.compress.rank == 0) throw ConfigError("compress.rank", 0, "must be at least 1");
}

}  // namespace lbgm
