// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opbench/fem/grid.hpp"
#include "opbench/fem/thermo_electrical.hpp"
#include "opbench/field_gen/random_fields.hpp"
#include "opbench/operator_nets/training.hpp"

namespace opbench::harness
{

enum class Benchmark
{
  reaction_diffusion,
  thermo_electrical_coupled,
  thermo_electrical_uncoupled,
};

std::string to_string(Benchmark b);
Benchmark parse_benchmark(const std::string &s);
bool is_thermo_electrical(Benchmark b) noexcept;

// Generator template for one input function; the seed is replaced per sample.
struct InputGenerator
{
  std::string name;
  field_gen::InputSpec spec;
  // When set, every sample draws this input with the same seed.
  std::optional<std::uint64_t> fixed_seed;
};

struct DatasetConfig
{
  Benchmark benchmark = Benchmark::reaction_diffusion;
  std::size_t n_samples = 1000;
  std::uint64_t master_seed = 0;
  std::size_t n_elements = 127;
  fem::TimeScheme scheme;
  fem::BoundarySpec bc;
  std::vector<InputGenerator> inputs;
  double diffusivity = 0.01;
  double k_thermal = 0.116;
  double beta = 3.9;
  fem::PicardSettings picard;
  std::size_t max_retries = 3;

  // Defaults for a benchmark: GRF inputs u0 (mean 0, var 1) and k (mean 1,
  // var 0.25) on the 255 nodes, or q_ext (mean 1, var 0.25) and rho_e
  // (mean 0, var 1) on the 101 time levels; correlation length 0.1.
  static DatasetConfig defaults(Benchmark b);
  void validate() const;
};

void to_json(nlohmann::json &j, const DatasetConfig &c);
// Missing keys keep the benchmark defaults.
DatasetConfig dataset_config_from_json(const nlohmann::json &j);

struct DatasetArray
{
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> data;

  bool operator==(const DatasetArray &) const = default;
};

/**
 * Generated samples plus provenance. On disk a directory holds
 * `dataset.json` (manifest and its SHA-256) and `<array>.f32` blobs,
 * little-endian row-major.
 */
struct Dataset
{
  nlohmann::json manifest;
  std::vector<DatasetArray> arrays;

  Benchmark benchmark() const;
  std::size_t n_samples() const;
  std::vector<std::string> input_names() const;
  std::vector<std::string> field_names() const;
  std::size_t n_steps() const;
  std::size_t n_nodes() const;
  const DatasetArray &array(const std::string &name) const;
  bool has_array(const std::string &name) const;

  // Rows `samples` of the inputs; one Tensor per input, [n, sensors].
  std::vector<ad::Tensor> inputs(const std::vector<std::size_t> &samples) const;
  // Field f of one sample as float64, time-major.
  std::vector<double> field(std::size_t f, std::size_t sample) const;

  bool operator==(const Dataset &) const = default;
};

// Query grid (x, t) of a dataset, time-major to match the field layout.
nets::QueryBatch space_time_coords(const Dataset &d);
nets::TrainingData to_training_data(const Dataset &d);

/**
 * Per-sample seeds derive from the master seed; a sample whose solve throws
 * SolverError is redrawn with a fresh derived seed up to max_retries times.
 * The output does not depend on `threads`. Throws HarnessError listing the
 * indices that kept failing.
 */
Dataset generate_dataset(const DatasetConfig &config, std::size_t threads = 1);

void save_dataset(const std::filesystem::path &dir, const Dataset &d);
// Verifies the manifest hash, blob hashes and dimensions; InputError otherwise.
Dataset load_dataset(const std::filesystem::path &dir);

// Seed of sample `index`, attempt `attempt` (0 = first try).
std::uint64_t sample_seed(std::uint64_t master_seed, std::size_t index, std::size_t attempt);

// Solves one sample's PDE for the given input values; used by generation and
// by runtime benchmarking. `reference` is required for the uncoupled mode.
std::vector<fem::FieldSolution> solve_sample(const DatasetConfig &config,
                                             const std::vector<field_gen::SampledFunction> &inputs,
                                             const fem::ReferenceFields *reference);

// Coupled solve of the dataset-mean inputs.
fem::ReferenceFields nominal_reference(const DatasetConfig &config);

}  // namespace opbench::harness
