// SPDX-License-Identifier: Apache-2.0

#include "opbench/harness/comparison.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "opbench/errors.hpp"
#include "opbench/parallel.hpp"

namespace opbench::harness
{

nets::ArchitectureSpec default_architecture(const Dataset &dataset, nets::BranchMode mode, std::size_t hidden_dim)
{
  nets::ArchitectureSpec s;
  s.family = is_thermo_electrical(dataset.benchmark()) ? nets::Family::s_deeponet : nets::Family::deeponet;
  s.branch_mode = mode;
  s.n_inputs = dataset.input_names().size();
  s.sensor_counts.clear();
  for (const auto &name : dataset.input_names())
  {
    s.sensor_counts.push_back(dataset.array(name).shape[1]);
  }
  s.hidden_dim = hidden_dim;
  s.n_output_fields = dataset.field_names().size();
  s.trunk_input_dim = 2;
  return s;
}

NamedArchitecture named_default(const Dataset &dataset, nets::BranchMode mode, std::size_t hidden_dim)
{
  const nets::ArchitectureSpec s = default_architecture(dataset, mode, hidden_dim);
  return {nets::to_string(s.family) + "_" + nets::to_string(mode), s};
}

nlohmann::json checkpoint_metadata(const Dataset &dataset, const RunConfig &config)
{
  return {{"benchmark", to_string(dataset.benchmark())},
          {"dataset_master_seed", dataset.manifest.at("config").at("master_seed")},
          {"dataset_n_samples", dataset.n_samples()},
          {"train_config", config.train},
          {"train_config_sha256", nets::config_hash(config.train)},
          {"split_seed", config.evaluate.split_seed},
          {"train_fraction", config.evaluate.train_fraction}};
}

RunResult train_and_evaluate(const Dataset &dataset, const nets::ArchitectureSpec &spec, const RunConfig &config,
                             const std::optional<std::filesystem::path> &checkpoint_dir)
{
  const nets::TrainingData data = to_training_data(dataset);
  const auto split =
      nets::train_test_split(dataset.n_samples(), config.evaluate.split_seed, config.evaluate.train_fraction);
  RunResult r{nets::build_model(spec), {}, {}};
  const auto t0 = std::chrono::steady_clock::now();
  r.training = nets::train(r.model, data, split.train, config.train);
  const double train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (checkpoint_dir)
  {
    nlohmann::json meta = checkpoint_metadata(dataset, config);
    meta["final_loss"] = r.training.final_loss;
    nets::save_checkpoint(*checkpoint_dir, r.model, meta);
  }
  r.report = evaluate_predictions(dataset, split.test, model_predictor(r.model, dataset), config.evaluate);
  r.report.timings.train_seconds = train_seconds;
  return r;
}

ComparisonTable run_comparison(const Dataset &dataset, const std::vector<NamedArchitecture> &architectures,
                               const ComparisonConfig &config)
{
  if (architectures.empty() || config.seeds.empty())
  {
    throw HarnessError("comparison needs at least one architecture and one seed");
  }
  ComparisonTable t;
  t.benchmark = to_string(dataset.benchmark());
  t.fields = dataset.field_names();
  t.seeds = config.seeds;
  for (const auto &a : architectures)
  {
    t.architectures.push_back(a.name);
  }
  const std::size_t n_seeds = config.seeds.size();
  const std::size_t n_runs = architectures.size() * n_seeds;
  struct Outcome
  {
    std::vector<double> mean_l2;
    std::string error;
  };
  std::vector<Outcome> outcomes(n_runs);
  parallel_for(n_runs, config.threads,
               [&](std::size_t k)
               {
                 const auto &arch = architectures[k / n_seeds];
                 const std::uint64_t seed = config.seeds[k % n_seeds];
                 nets::ArchitectureSpec spec = arch.spec;
                 spec.seed = seed;
                 RunConfig rc = config.run;
                 rc.train.seed = seed;
                 std::optional<std::filesystem::path> dir;
                 if (config.checkpoint_dir)
                 {
                   dir = *config.checkpoint_dir / arch.name / ("seed" + std::to_string(seed));
                 }
                 try
                 {
                   const RunResult r = train_and_evaluate(dataset, spec, rc, dir);
                   for (const auto &f : r.report.fields)
                   {
                     outcomes[k].mean_l2.push_back(f.mean_l2);
                   }
                 }
                 catch (const TrainingError &e)
                 {
                   outcomes[k].error = e.what();
                 }
               });

  t.cells.assign(t.rows(), std::vector<ComparisonCell>(t.cols()));
  for (std::size_t row = 0; row < t.rows(); ++row)
  {
    for (std::size_t f = 0; f < t.cols(); ++f)
    {
      ComparisonCell &cell = t.cells[row][f];
      for (std::size_t s = 0; s < n_seeds; ++s)
      {
        const Outcome &o = outcomes[row * n_seeds + s];
        if (o.error.empty())
        {
          cell.per_seed.push_back(o.mean_l2[f]);
        }
        else
        {
          cell.failed = true;
          cell.error = o.error;
        }
      }
      if (!cell.failed)
      {
        std::vector<double> v = cell.per_seed;
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size();
        cell.median = m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
      }
    }
  }
  t.best.assign(t.cols(), std::nullopt);
  for (std::size_t f = 0; f < t.cols(); ++f)
  {
    for (std::size_t row = 0; row < t.rows(); ++row)
    {
      const ComparisonCell &cell = t.cells[row][f];
      if (!cell.failed && (!t.best[f] || cell.median < t.cells[*t.best[f]][f].median))
      {
        t.best[f] = row;
      }
    }
  }
  return t;
}

nlohmann::json to_json(const ComparisonTable &t)
{
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < t.rows(); ++r)
  {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t f = 0; f < t.cols(); ++f)
    {
      const auto &c = t.cells[r][f];
      cells.push_back({{"field", t.fields[f]},
                       {"median_mean_l2", c.failed ? nlohmann::json(nullptr) : nlohmann::json(c.median)},
                       {"per_seed_mean_l2", c.per_seed},
                       {"failed", c.failed},
                       {"error", c.error},
                       {"best", t.best[f] && *t.best[f] == r}});
    }
    rows.push_back({{"architecture", t.architectures[r]}, {"cells", cells}});
  }
  return {{"benchmark", t.benchmark}, {"fields", t.fields}, {"seeds", t.seeds}, {"rows", rows}};
}

std::string to_markdown(const ComparisonTable &t)
{
  std::string out = "Mean L2 relative error (%), median over " + std::to_string(t.seeds.size()) + " seeds: " +
                    t.benchmark + "\n\n| architecture |";
  for (const auto &f : t.fields)
  {
    out += " " + f + " |";
  }
  out += "\n|---|";
  for (std::size_t f = 0; f < t.cols(); ++f)
  {
    out += "---|";
  }
  out += "\n";
  for (std::size_t r = 0; r < t.rows(); ++r)
  {
    out += "| " + t.architectures[r] + " |";
    for (std::size_t f = 0; f < t.cols(); ++f)
    {
      const auto &c = t.cells[r][f];
      if (c.failed)
      {
        out += " failed |";
        continue;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", 100.0 * c.median);
      out += std::string(" ") + buf + (t.best[f] && *t.best[f] == r ? " (best)" : "") + " |";
    }
    out += "\n";
  }
  return out;
}

std::string to_csv(const ComparisonTable &t)
{
  std::string out = "architecture,field,median_mean_l2,failed,best\n";
  for (std::size_t r = 0; r < t.rows(); ++r)
  {
    for (std::size_t f = 0; f < t.cols(); ++f)
    {
      const auto &c = t.cells[r][f];
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", c.median);
      out += t.architectures[r] + "," + t.fields[f] + "," + (c.failed ? std::string() : std::string(buf)) + "," +
             (c.failed ? "1" : "0") + "," + (t.best[f] && *t.best[f] == r ? "1" : "0") + "\n";
    }
  }
  return out;
}

}  // namespace opbench::harness
