// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment front door: dispatch a parsed config, write the CSV outputs and
// report a one-line summary.

#ifndef LBGM_HARNESS_HPP_
#define LBGM_HARNESS_HPP_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "lbgm/config.hpp"
#include "lbgm/metrics.hpp"

namespace lbgm {

/// 1 - floats(algo) / floats(baseline).
double savings(double algo_floats, double baseline_floats);

/// Baseline row with the same round number as `ours`, if present.
std::optional<MetricsRow> matched_baseline_row(const MetricsTable& baseline, std::size_t round);

std::string summary_line(const ExperimentConfig& cfg, const MetricsTable& metrics,
                         const std::optional<MetricsRow>& baseline);

/// Runs the experiment and writes metrics.csv and ledger.csv (or the
/// analyzer CSVs) into cfg.out_dir. Returns 0 on success; any failure is
/// reported on `err` with a nonzero exit code.
int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/// Reads and parses `config_path`, applies overrides, then calls run().
int run_file(const std::filesystem::path& config_path, const std::vector<std::string>& overrides, std::ostream& out,
             std::ostream& err);

}  // namespace lbgm

#endif  // LBGM_HARNESS_HPP_
