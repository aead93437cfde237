// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/harness.hpp"

#include <exception>
#include <sstream>

#include "lbgm/analyzer.hpp"
#include "lbgm/simulation.hpp"

namespace lbgm {

double savings(double algo_floats, double baseline_floats) {
  if (!(baseline_floats > 0.0)) throw std::invalid_argument("savings: baseline floats must be positive");
  return 1.0 - algo_floats / baseline_floats;
}

std::optional<MetricsRow> matched_baseline_row(const MetricsTable& baseline, std::size_t round) {
  for (const auto& row : baseline.rows) {
    if (row.round == round) return row;
  }
  return std::nullopt;
}

std::string summary_line(const ExperimentConfig& cfg, const MetricsTable& metrics,
                         const std::optional<MetricsRow>& baseline) {
  const MetricsRow& last = metrics.last();
  const bool classifier = cfg.model.kind != ModelKind::kLinearRegression;
  std::ostringstream s;
  s << "algorithm=" << to_string(cfg.algorithm) << " rounds=" << last.round << ' '
    << (classifier ? "final_accuracy=" : "final_test_loss=") << format_double(last.test_metric)
    << " total_floats=" << format_double(last.cum_floats) << " total_bits=" << last.cum_bits;
  if (baseline && baseline->cum_floats > 0.0) {
    s << " savings_vs_baseline=" << format_double(savings(last.cum_floats, baseline->cum_floats));
  }
  return s.str();
}

namespace {

void run_analyzer(const Experiment& exp, std::ostream& out) {
  const auto& cfg = exp.config;
  RngStream rng(cfg.train.seed, stream_tag::kCentral);
  const PcaOptions opts{cfg.analyze.squared};
  CentralizedRecord rec = record_centralized(exp.model, exp.train, exp.theta0, cfg.train.rounds, exp.round.eta,
                                             cfg.train.batch_size, rng, opts);
  if (cfg.analyze.layer >= 0) {
    const auto shapes = exp.model.layer_shapes();
    rec.log = rec.log.layer(shapes, static_cast<std::size_t>(cfg.analyze.layer));
    rec.n95.clear();
    rec.n99.clear();
    GradientLog prefix;
    for (const auto& g : rec.log.grads) {
      prefix.grads.push_back(g);
      rec.n95.push_back(n_pca(prefix, 0.95, opts));
      rec.n99.push_back(n_pca(prefix, 0.99, opts));
    }
  }
  const auto directions = pgd(rec.log, 0.99, opts);
  const std::filesystem::path dir(cfg.out_dir);
  write_text_file(dir / "npca.csv", npca_to_csv(rec));
  write_text_file(dir / "overlap.csv", matrix_to_csv(overlap_matrix(rec.log, directions)));
  write_text_file(dir / "similarity.csv", matrix_to_csv(similarity_matrix(rec.log)));
  out << "algorithm=centralized_analyze epochs=" << rec.log.size() << " n95=" << rec.n95.back()
      << " n99=" << rec.n99.back() << '\n';
}

}  // namespace

int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    const Experiment exp = make_experiment(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.algorithm == Algorithm::kCentralizedAnalyze) {
      run_analyzer(exp, out);
      return 0;
    }
    const RunResult result = run_algorithm(exp);
    const std::filesystem::path dir(cfg.out_dir);
    write_text_file(dir / "metrics.csv", to_csv(result.metrics));
    write_text_file(dir / "ledger.csv", to_csv(result.ledger));
    std::optional<MetricsRow> baseline;
    if (!cfg.baseline_metrics.empty()) {
      const MetricsTable table = parse_metrics_csv(read_text_file(cfg.baseline_metrics));
      baseline = matched_baseline_row(table, result.metrics.last().round);
      if (!baseline) err << "warning: baseline has no row for round " << result.metrics.last().round << '\n';
    }
    out << summary_line(cfg, result.metrics, baseline) << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_file(const std::filesystem::path& config_path, const std::vector<std::string>& overrides, std::ostream& out,
             std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config(read_text_file(config_path), overrides);
  } catch (const std::exception& e) {
    err << "error: " << config_path.string() << ": " << e.what() << '\n';
    return 2;
  }
  return run(cfg, out, err);
}

}  // namespace lbgm
