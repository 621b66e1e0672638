// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opbench/harness/dataset.hpp"
#include "opbench/harness/evaluation.hpp"
#include "opbench/operator_nets/architecture.hpp"
#include "opbench/operator_nets/training.hpp"

namespace opbench::harness
{

struct NamedArchitecture
{
  std::string name;
  nets::ArchitectureSpec spec;
};

// Architecture matching a dataset's inputs and fields: DeepONet for the
// reaction-diffusion benchmark, S-DeepONet for the thermo-electrical ones.
nets::ArchitectureSpec default_architecture(const Dataset &dataset, nets::BranchMode mode,
                                            std::size_t hidden_dim = 64);
NamedArchitecture named_default(const Dataset &dataset, nets::BranchMode mode, std::size_t hidden_dim = 64);

struct RunConfig
{
  nets::TrainConfig train;
  EvaluateOptions evaluate;
};

struct RunResult
{
  nets::OperatorModel model;
  nets::TrainResult training;
  MetricsReport report;
};

// Train on the split's train part and evaluate on its test part. Writes the
// checkpoint when `checkpoint_dir` is given.
RunResult train_and_evaluate(const Dataset &dataset, const nets::ArchitectureSpec &spec, const RunConfig &config,
                             const std::optional<std::filesystem::path> &checkpoint_dir = std::nullopt);

nlohmann::json checkpoint_metadata(const Dataset &dataset, const RunConfig &config);

struct ComparisonCell
{
  std::vector<double> per_seed;  // mean L2 of each seed that finished
  double median = 0.0;
  bool failed = false;
  std::string error;
};

struct ComparisonTable
{
  std::string benchmark;
  std::vector<std::string> fields;
  std::vector<std::string> architectures;
  std::vector<std::uint64_t> seeds;
  // cells[row][field]
  std::vector<std::vector<ComparisonCell>> cells;
  // best[field] = row with the lowest median among finished cells
  std::vector<std::optional<std::size_t>> best;

  std::size_t rows() const noexcept { return architectures.size(); }
  std::size_t cols() const noexcept { return fields.size(); }
};

struct ComparisonConfig
{
  RunConfig run;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t threads = 1;
  // Checkpoints go to <dir>/<architecture>/seed<k> when set.
  std::optional<std::filesystem::path> checkpoint_dir;
};

/**
 * Trains each architecture once per seed (the seed sets both initialization
 * and minibatch order), evaluates mean L2 per field and reports the median
 * across seeds. A TrainingError marks the cell failed instead of aborting.
 */
ComparisonTable run_comparison(const Dataset &dataset, const std::vector<NamedArchitecture> &architectures,
                               const ComparisonConfig &config);

nlohmann::json to_json(const ComparisonTable &t);
// Rows are architectures, columns fields; values in percent.
std::string to_markdown(const ComparisonTable &t);
std::string to_csv(const ComparisonTable &t);

}  // namespace opbench::harness
