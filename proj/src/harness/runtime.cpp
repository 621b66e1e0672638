// SPDX-License-Identifier: Apache-2.0

#include "opbench/harness/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "opbench/errors.hpp"

namespace opbench::harness
{

namespace
{

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RuntimeReport bench_runtime(const Dataset &dataset, const nets::Checkpoint &checkpoint,
                            const RuntimeOptions &options)
{
  if (options.n_trials == 0 || options.fem_samples == 0 || options.inference_samples == 0)
  {
    throw HarnessError("bench_runtime needs positive trial and sample counts");
  }
  const std::string got = checkpoint.metadata.value("benchmark", std::string());
  if (got != to_string(dataset.benchmark()))
  {
    throw HarnessError("checkpoint benchmark '" + got + "' does not match the dataset");
  }
  const DatasetConfig config = dataset_config_from_json(dataset.manifest.at("config"));
  std::optional<fem::ReferenceFields> reference;
  if (config.benchmark == Benchmark::thermo_electrical_uncoupled)
  {
    reference = nominal_reference(config);
  }

  const std::size_t n = dataset.n_samples();
  std::vector<std::size_t> fem_idx, inf_idx;
  for (std::size_t i = 0; i < options.fem_samples; ++i)
  {
    fem_idx.push_back(i % n);
  }
  for (std::size_t i = 0; i < options.inference_samples; ++i)
  {
    inf_idx.push_back(i % n);
  }

  // Inputs as the solver sees them: dataset values on the generator's coordinates.
  std::vector<std::vector<field_gen::SampledFunction>> fem_inputs;
  const std::vector<ad::Tensor> stored = dataset.inputs(fem_idx);
  for (std::size_t s = 0; s < fem_idx.size(); ++s)
  {
    std::vector<field_gen::SampledFunction> in;
    for (std::size_t j = 0; j < stored.size(); ++j)
    {
      const std::size_t pts = stored[j].dim(1);
      const double length =
          dataset.manifest.at("config").at("inputs").at(j).at("generator").at("domain_length").get<double>();
      std::vector<double> values(stored[j].ptr() + s * pts, stored[j].ptr() + (s + 1) * pts);
      in.push_back({field_gen::equispaced(pts, length), std::move(values)});
    }
    fem_inputs.push_back(std::move(in));
  }

  const nets::FieldPredictor predictor(checkpoint.model, space_time_coords(dataset));
  std::vector<std::vector<ad::Tensor>> batches;
  for (std::size_t start = 0; start < inf_idx.size(); start += options.batch_size)
  {
    const std::vector<std::size_t> chunk(
        inf_idx.begin() + static_cast<std::ptrdiff_t>(start),
        inf_idx.begin() + static_cast<std::ptrdiff_t>(std::min(inf_idx.size(), start + options.batch_size)));
    batches.push_back(dataset.inputs(chunk));
  }

  RuntimeReport r;
  r.n_queries = predictor.n_queries();
  double sink = 0.0;
  for (std::size_t trial = 0; trial < options.n_trials; ++trial)
  {
    auto t0 = std::chrono::steady_clock::now();
    for (const auto &in : fem_inputs)
    {
      const auto fields = solve_sample(config, in, reference ? &*reference : nullptr);
      sink += fields.back().values().back();
    }
    r.fem_seconds_per_sample.push_back(seconds_since(t0) / static_cast<double>(fem_inputs.size()));

    t0 = std::chrono::steady_clock::now();
    for (const auto &b : batches)
    {
      const ad::Tensor pred = predictor.predict(b);
      sink += pred[pred.size() - 1];
    }
    r.inference_seconds_per_sample.push_back(seconds_since(t0) / static_cast<double>(inf_idx.size()));
  }
  if (!std::isfinite(sink))
  {
    throw HarnessError("non-finite values during runtime benchmark");
  }
  r.fem_median = median(r.fem_seconds_per_sample);
  r.inference_median = median(r.inference_seconds_per_sample);
  r.speedup = r.fem_median / r.inference_median;
  return r;
}

nlohmann::json to_json(const RuntimeReport &r)
{
  return {{"fem_seconds_per_sample", r.fem_seconds_per_sample},
          {"inference_seconds_per_sample", r.inference_seconds_per_sample},
          {"fem_median_seconds", r.fem_median},
          {"inference_median_seconds", r.inference_median},
          {"speedup", r.speedup},
          {"n_queries", r.n_queries}};
}

}  // namespace opbench::harness
