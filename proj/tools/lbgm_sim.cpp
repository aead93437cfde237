// Copyright 2026 The LBGM Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end:
//   lbgm_sim run <config-file> [--seed N] [--out DIR] [--override key=value ...]

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lbgm/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deterministic federated-learning simulator with look-back gradient multipliers"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "Run one experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Master seed (overrides train.seed)");
  run->add_option("--out", out_dir, "Output directory (overrides out)");
  run->add_option("--override", overrides, "Extra section.key=value overrides")->take_all();

  CLI11_PARSE(app, argc, argv);

  // Flag-style options are applied after file-level overrides so they win.
  if (seed) overrides.push_back("train.seed=" + std::to_string(*seed));
  if (out_dir) overrides.push_back("out=" + *out_dir);
  return lbgm::run_file(config_path, overrides, std::cout, std::cerr);
}
