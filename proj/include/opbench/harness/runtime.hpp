// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "opbench/harness/dataset.hpp"
#include "opbench/operator_nets/checkpoint.hpp"

namespace opbench::harness
{

struct RuntimeOptions
{
  std::size_t n_trials = 5;
  // Samples re-solved with the FEM per trial.
  std::size_t fem_samples = 8;
  // Samples predicted in one batch per trial.
  std::size_t inference_samples = 100;
  std::size_t batch_size = 100;
};

struct RuntimeReport
{
  std::vector<double> fem_seconds_per_sample;        // one per trial
  std::vector<double> inference_seconds_per_sample;  // one per trial
  double fem_median = 0.0;
  double inference_median = 0.0;
  double speedup = 0.0;  // fem_median / inference_median
  std::size_t n_queries = 0;
};

/**
 * Both sides run single-threaded on the same samples of the dataset. The FEM
 * side re-solves the stored inputs with the dataset's configuration; the
 * model side predicts full space-time fields with the trunk evaluated once
 * for the query grid (reused across all samples, so excluded from timing).
 */
RuntimeReport bench_runtime(const Dataset &dataset, const nets::Checkpoint &checkpoint,
                            const RuntimeOptions &options = {});

nlohmann::json to_json(const RuntimeReport &r);

}  // namespace opbench::harness
