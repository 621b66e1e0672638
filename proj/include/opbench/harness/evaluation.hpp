// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opbench/harness/dataset.hpp"
#include "opbench/harness/metrics.hpp"
#include "opbench/operator_nets/checkpoint.hpp"

namespace opbench::harness
{

struct EvaluateOptions
{
  std::uint64_t split_seed = 0;
  double train_fraction = 0.8;
  std::vector<double> percentiles{0.0, 55.0, 85.0, 99.0};
  std::size_t bins = 30;
  std::size_t batch_size = 64;
};

void to_json(nlohmann::json &j, const EvaluateOptions &o);
void from_json(const nlohmann::json &j, EvaluateOptions &o);

struct FieldMetrics
{
  std::string name;
  // Per test sample, in test-index order; nullopt marks a degenerate target.
  std::vector<std::optional<double>> l2;
  std::vector<double> mae;
  double mean_l2 = 0.0;  // over non-degenerate samples
  double mean_mae = 0.0;
  std::size_t n_degenerate = 0;
  // Sample fields index into test_indices.
  std::vector<PercentileExemplar> percentiles;
  Histogram l2_histogram;
};

struct Timings
{
  double train_seconds = 0.0;
  double inference_seconds_per_sample = 0.0;
  double fem_seconds_per_sample = 0.0;
};

struct MetricsReport
{
  std::string benchmark;
  std::vector<std::size_t> test_indices;
  std::vector<FieldMetrics> fields;
  Timings timings;
};

// Everything except wall-clock timings, so equal inputs give equal bytes.
nlohmann::json metrics_json(const MetricsReport &r);
nlohmann::json timings_json(const Timings &t);

// Predictions [batch, c, n_points] for the given dataset samples.
using PredictFn = std::function<ad::Tensor(const std::vector<std::size_t> &samples)>;

MetricsReport evaluate_predictions(const Dataset &dataset, const std::vector<std::size_t> &test_indices,
                                   const PredictFn &predict, const EvaluateOptions &options);

// Recomputes the split from options.split_seed. Throws HarnessError when the
// checkpoint was trained on a different benchmark.
MetricsReport evaluate(const nets::Checkpoint &checkpoint, const Dataset &dataset, const EvaluateOptions &options);

PredictFn model_predictor(const nets::OperatorModel &model, const Dataset &dataset);

/**
 * Writes metrics.json, timings.json, per_sample.csv, percentiles.csv,
 * histogram_<field>.csv and one exemplar_p<pct>_<field>.csv field dump
 * (x, t, target, prediction) per percentile exemplar.
 */
void write_report(const std::filesystem::path &dir, const MetricsReport &report, const Dataset &dataset,
                  const PredictFn &predict);

}  // namespace opbench::harness
