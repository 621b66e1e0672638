// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "opbench/operator_nets/model.hpp"

namespace opbench::nets
{

// Paired inputs and target fields sharing one query grid.
struct TrainingData
{
  std::vector<ad::Tensor> inputs;  // per input function: [N, sensors]
  std::vector<ad::Tensor> fields;  // per output field: [N, n_points]
  QueryBatch coords;               // n_points rows

  std::size_t n_samples() const { return inputs.empty() ? 0 : inputs[0].dim(0); }
  // Throws InputError on inconsistent shapes.
  void validate() const;
  // Rows `indices` of every input, as a model batch.
  std::vector<ad::Tensor> gather_inputs(const std::vector<std::size_t> &indices) const;
};

struct Split
{
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle; the first round(fraction * n) indices train.
Split train_test_split(std::size_t n, std::uint64_t seed, double train_fraction = 0.8);

struct TrainConfig
{
  // One epoch is one optimizer step on a sampled minibatch.
  std::size_t epochs = 20000;
  std::size_t batch_size = 32;
  // Query points sampled per step; 0 uses every point.
  std::size_t n_query = 512;
  double learning_rate = 1e-3;
  // Inverse-time decay: lr / (1 + decay_rate * epoch / decay_steps). 0 disables.
  double decay_rate = 0.0;
  std::size_t decay_steps = 1000;
  std::size_t log_interval = 100;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TrainConfig &) const = default;
};

void to_json(nlohmann::json &j, const TrainConfig &c);
void from_json(const nlohmann::json &j, TrainConfig &c);
std::string config_hash(const TrainConfig &c);

struct LossRecord
{
  std::size_t epoch;
  double loss;  // minibatch loss averaged over the logging interval
  bool operator==(const LossRecord &) const = default;
};

struct TrainResult
{
  std::vector<LossRecord> history;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

// Scalar mean/std per input and per field over the given samples; coordinate
// bounds from the query grid.
Normalization fit_normalization(const ArchitectureSpec &spec, const TrainingData &data,
                                const std::vector<std::size_t> &samples);

// Mean squared error in normalized space over the given samples and all points.
double evaluate_loss(const OperatorModel &model, const TrainingData &data, const std::vector<std::size_t> &samples);

using ProgressFn = std::function<void(const LossRecord &)>;

/**
 * Adam on minibatch MSE in normalized space. Normalization is fitted on
 * `train_samples` before the first step. Throws TrainingError with the epoch
 * index on a non-finite loss.
 */
TrainResult train(OperatorModel &model, const TrainingData &data, const std::vector<std::size_t> &train_samples,
                  const TrainConfig &config, const ProgressFn &progress = {});

}  // namespace opbench::nets
