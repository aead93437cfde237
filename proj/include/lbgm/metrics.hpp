// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Communication ledger and per-round metrics, with their CSV forms.

#ifndef LBGM_METRICS_HPP_
#define LBGM_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lbgm/payloads.hpp"

namespace lbgm {

struct LedgerRow {
  std::size_t round = 0;
  std::size_t worker = 0;
  double floats = 0.0;
  std::uint64_t bits = 0;
};

/// Append-only record of every uplink message.
class CommLedger {
 public:
  /// Throws std::logic_error if `round` precedes an already recorded round.
  void record(std::size_t round, std::size_t worker, const WireCost& cost);

  const std::vector<LedgerRow>& rows() const { return rows_; }
  double total_floats() const { return total_floats_; }
  std::uint64_t total_bits() const { return total_bits_; }

 private:
  std::vector<LedgerRow> rows_;
  double total_floats_ = 0.0;
  std::uint64_t total_bits_ = 0;
};

struct MetricsRow {
  std::size_t round = 0;
  double train_loss = 0.0;
  double test_metric = 0.0;  // accuracy for classifiers, loss for regression
  double cum_floats = 0.0;
  std::uint64_t cum_bits = 0;
  double scalar_fraction = 0.0;
  double delta_sq_proxy = 0.0;
};

/// Row 0 is the evaluation of the initial model; row t follows round t.
struct MetricsTable {
  std::vector<MetricsRow> rows;

  const MetricsRow& last() const { return rows.back(); }
};

inline constexpr const char* kMetricsHeader =
    "round,train_loss,test_metric,cum_floats,cum_bits,scalar_fraction,delta_sq_proxy";
inline constexpr const char* kLedgerHeader = "round,worker,floats,bits";

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

std::string to_csv(const MetricsTable& table);
std::string to_csv(const CommLedger& ledger);
MetricsTable parse_metrics_csv(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace lbgm

#endif  // LBGM_METRICS_HPP_
