// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbgm/metrics.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace lbgm {

void CommLedger::record(std::size_t round, std::size_t worker, const WireCost& cost) {
  if (!rows_.empty() && round < rows_.back().round) {
    throw std::logic_error("CommLedger: rounds must be recorded in order");
  }
  rows_.push_back({round, worker, cost.floats, cost.bits});
  total_floats_ += cost.floats;
  total_bits_ += cost.bits;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const MetricsTable& table) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& r : table.rows) {
    out += std::to_string(r.round) + ',' + format_double(r.train_loss) + ',' + format_double(r.test_metric) + ',' +
           format_double(r.cum_floats) + ',' + std::to_string(r.cum_bits) + ',' + format_double(r.scalar_fraction) +
           ',' + format_double(r.delta_sq_proxy) + '\n';
  }
  return out;
}

std::string to_csv(const CommLedger& ledger) {
  std::string out = std::string(kLedgerHeader) + "\n";
  for (const auto& r : ledger.rows()) {
    out += std::to_string(r.round) + ',' + std::to_string(r.worker) + ',' + format_double(r.floats) + ',' +
           std::to_string(r.bits) + '\n';
  }
  return out;
}

namespace {

double parse_double(const std::string& field) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::runtime_error("metrics csv: bad number '" + field + "'");
  }
  return v;
}

}  // namespace

MetricsTable parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw std::runtime_error("metrics csv: unexpected header");
  }
  MetricsTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    if (fields.size() != 7) throw std::runtime_error("metrics csv: expected 7 fields in '" + line + "'");
    MetricsRow r;
    r.round = static_cast<std::size_t>(parse_double(fields[0]));
    r.train_loss = parse_double(fields[1]);
    r.test_metric = parse_double(fields[2]);
    r.cum_floats = parse_double(fields[3]);
    r.cum_bits = static_cast<std::uint64_t>(parse_double(fields[4]));
    r.scalar_fraction = parse_double(fields[5]);
    r.delta_sq_proxy = parse_double(fields[6]);
    table.rows.push_back(r);
  }
  return table;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace lbgm
