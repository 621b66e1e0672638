// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: dataset generation, training, evaluation,
// architecture comparison, runtime benchmarking and constitutive evaluation.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "opbench/constitutive/kozlowski.hpp"
#include "opbench/errors.hpp"
#include "opbench/harness/comparison.hpp"
#include "opbench/harness/dataset.hpp"
#include "opbench/harness/evaluation.hpp"
#include "opbench/harness/runtime.hpp"
#include "opbench/io/binary.hpp"
#include "opbench/operator_nets/checkpoint.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace opbench;

namespace
{

struct Globals
{
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::size_t threads = 1;
};

json load_config(const Globals &g)
{
  if (g.config_path.empty())
  {
    return json::object();
  }
  try
  {
    return json::parse(io::read_text(g.config_path));
  }
  catch (const json::exception &e)
  {
    throw InputError("malformed config " + g.config_path + ": " + e.what());
  }
}

json section(const json &cfg, const char *key)
{
  return cfg.contains(key) ? cfg.at(key) : json::object();
}

fs::path require_out_dir(const Globals &g, const char *cmd)
{
  if (g.out_dir.empty())
  {
    throw InputError(std::string(cmd) + " requires --out-dir");
  }
  return g.out_dir;
}

void print(const json &j)
{
  std::cout << j.dump(2) << "\n";
}

nets::BranchMode mode_or(const std::string &s, nets::BranchMode d)
{
  return s.empty() ? d : nets::parse_branch_mode(s);
}

nets::ArchitectureSpec architecture_from(const json &cfg, const harness::Dataset &d, const std::string &mode,
                                         std::optional<std::uint64_t> seed)
{
  const json a = section(cfg, "architecture");
  nets::ArchitectureSpec base =
      harness::default_architecture(d, mode_or(mode, nets::parse_branch_mode(a.value("branch_mode", "single"))),
                                    a.value("hidden_dim", std::size_t{64}));
  json merged = base;
  merged.update(a);
  if (!mode.empty())
  {
    merged["branch_mode"] = mode;
  }
  nets::ArchitectureSpec spec = merged.get<nets::ArchitectureSpec>();
  if (seed)
  {
    spec.seed = *seed;
  }
  spec.validate();
  return spec;
}

harness::RunConfig run_config_from(const json &cfg, std::optional<std::uint64_t> seed,
                                   std::optional<std::uint64_t> split_seed)
{
  harness::RunConfig rc;
  rc.train = section(cfg, "train").get<nets::TrainConfig>();
  rc.evaluate = section(cfg, "evaluate").get<harness::EvaluateOptions>();
  if (seed)
  {
    rc.train.seed = *seed;
  }
  if (split_seed)
  {
    rc.evaluate.split_seed = *split_seed;
  }
  return rc;
}

int run(int argc, char **argv)
{
  CLI::App app{"Operator-network benchmark suite for coupled PDE surrogates"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON configuration file");
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out-dir", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  // gen-data
  auto *gen = app.add_subcommand("gen-data", "Generate a dataset");
  std::string benchmark;
  std::optional<std::size_t> n_samples;
  gen->add_option("--benchmark", benchmark, "reaction_diffusion | thermo_electrical_coupled | thermo_electrical_uncoupled");
  gen->add_option("--n-samples", n_samples, "Number of samples");

  // train
  auto *train = app.add_subcommand("train", "Train one architecture");
  std::string dataset_dir, mode;
  std::optional<std::size_t> epochs;
  std::optional<std::uint64_t> split_seed;
  train->add_option("--dataset", dataset_dir, "Dataset directory")->required();
  train->add_option("--branch-mode", mode, "single | multi");
  train->add_option("--epochs", epochs, "Optimizer steps");
  train->add_option("--split-seed", split_seed, "Train/test split seed");

  // evaluate
  auto *eval = app.add_subcommand("evaluate", "Evaluate a checkpoint on the test split");
  std::string checkpoint_dir;
  eval->add_option("--dataset", dataset_dir, "Dataset directory")->required();
  eval->add_option("--checkpoint", checkpoint_dir, "Checkpoint directory")->required();
  eval->add_option("--split-seed", split_seed, "Train/test split seed (default: from checkpoint)");

  // compare
  auto *cmp = app.add_subcommand("compare", "Multi-seed comparison of architectures");
  std::vector<std::uint64_t> seeds;
  cmp->add_option("--dataset", dataset_dir, "Dataset directory")->required();
  cmp->add_option("--seeds", seeds, "Seeds (at least 3 for a comparison)")->delimiter(',');
  cmp->add_option("--epochs", epochs, "Optimizer steps");
  cmp->add_option("--split-seed", split_seed, "Train/test split seed");

  // bench-runtime
  auto *bench = app.add_subcommand("bench-runtime", "FEM vs model inference time per sample");
  std::size_t trials = 5;
  bench->add_option("--dataset", dataset_dir, "Dataset directory")->required();
  bench->add_option("--checkpoint", checkpoint_dir, "Checkpoint directory")->required();
  bench->add_option("--trials", trials, "Timing trials")->check(CLI::PositiveNumber);

  // constitutive eval
  auto *cons = app.add_subcommand("constitutive", "Pointwise constitutive law");
  cons->require_subcommand(1);
  auto *cons_eval = cons->add_subcommand("eval", "Inelastic strain rate of the Kozlowski law");
  double stress = 0.0, strain = 0.0, pct_c = 0.09;
  std::optional<double> temp_k, temp_c;
  cons_eval->add_option("--stress,--sigma", stress, "Effective stress (MPa)")->required();
  cons_eval->add_option("--inelastic-strain,--eps", strain, "Accumulated inelastic strain");
  cons_eval->add_option("--carbon", pct_c, "Carbon content (wt%)");
  auto *tk = cons_eval->add_option("--temperature-k,--temp", temp_k, "Temperature (K)");
  auto *tc = cons_eval->add_option("--temperature-c", temp_c, "Temperature (degC)");
  tk->excludes(tc);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    std::cerr << json{{"error", {{"kind", "UsageError"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  }
  const json cfg = load_config(g);

  if (gen->parsed())
  {
    json dc = section(cfg, "dataset");
    if (!benchmark.empty()) dc["benchmark"] = benchmark;
    if (n_samples) dc["n_samples"] = *n_samples;
    if (g.seed) dc["master_seed"] = *g.seed;
    const harness::DatasetConfig config = harness::dataset_config_from_json(dc);
    const fs::path out = require_out_dir(g, "gen-data");
    const harness::Dataset d = harness::generate_dataset(config, g.threads);
    harness::save_dataset(out, d);
    print({{"dataset", out.string()}, {"benchmark", harness::to_string(config.benchmark)},
           {"n_samples", d.n_samples()}, {"retries", d.manifest.at("retries").size()}});
  }
  else if (train->parsed())
  {
    const harness::Dataset d = harness::load_dataset(dataset_dir);
    harness::RunConfig rc = run_config_from(cfg, g.seed, split_seed);
    if (epochs) rc.train.epochs = *epochs;
    const nets::ArchitectureSpec spec = architecture_from(cfg, d, mode, g.seed);
    const fs::path out = require_out_dir(g, "train");
    const harness::RunResult r = harness::train_and_evaluate(d, spec, rc, out);
    json history = json::array();
    for (const auto &h : r.training.history)
    {
      history.push_back({{"epoch", h.epoch}, {"loss", h.loss}});
    }
    io::write_text(out / "loss_history.json", history.dump(2) + "\n");
    io::write_text(out / "train_timings.json", harness::timings_json(r.report.timings).dump(2) + "\n");
    json summary{{"checkpoint", out.string()},
                 {"parameters", r.model.params.total_count()},
                 {"initial_loss", r.training.initial_loss},
                 {"final_loss", r.training.final_loss}};
    for (const auto &f : r.report.fields)
    {
      summary["test_mean_l2"][f.name] = f.mean_l2;
    }
    print(summary);
  }
  else if (eval->parsed())
  {
    const harness::Dataset d = harness::load_dataset(dataset_dir);
    const nets::Checkpoint c = nets::load_checkpoint(checkpoint_dir);
    harness::EvaluateOptions opt = section(cfg, "evaluate").get<harness::EvaluateOptions>();
    opt.split_seed = split_seed ? *split_seed : c.metadata.value("split_seed", opt.split_seed);
    opt.train_fraction = c.metadata.value("train_fraction", opt.train_fraction);
    const harness::MetricsReport r = harness::evaluate(c, d, opt);
    const fs::path out = require_out_dir(g, "evaluate");
    harness::write_report(out, r, d, harness::model_predictor(c.model, d));
    json summary{{"report", out.string()}};
    for (const auto &f : r.fields)
    {
      summary["mean_l2"][f.name] = f.mean_l2;
      summary["mean_mae"][f.name] = f.mean_mae;
    }
    print(summary);
  }
  else if (cmp->parsed())
  {
    const harness::Dataset d = harness::load_dataset(dataset_dir);
    harness::ComparisonConfig cc;
    cc.run = run_config_from(cfg, std::nullopt, split_seed);
    if (epochs) cc.run.train.epochs = *epochs;
    cc.threads = g.threads;
    const json cs = section(cfg, "compare");
    if (!seeds.empty())
    {
      cc.seeds = seeds;
    }
    else if (cs.contains("seeds"))
    {
      cc.seeds = cs.at("seeds").get<std::vector<std::uint64_t>>();
    }
    std::vector<harness::NamedArchitecture> archs;
    if (cs.contains("architectures"))
    {
      for (const auto &a : cs.at("architectures"))
      {
        json one = cfg;
        one["architecture"] = a;
        const nets::ArchitectureSpec spec = architecture_from(one, d, "", std::nullopt);
        archs.push_back({a.value("name", nets::to_string(spec.family) + "_" + nets::to_string(spec.branch_mode)), spec});
      }
    }
    else
    {
      archs = {harness::named_default(d, nets::BranchMode::single), harness::named_default(d, nets::BranchMode::multi)};
    }
    const fs::path out = require_out_dir(g, "compare");
    cc.checkpoint_dir = out / "checkpoints";
    const harness::ComparisonTable t = harness::run_comparison(d, archs, cc);
    fs::create_directories(out);
    io::write_text(out / "comparison.json", harness::to_json(t).dump(2) + "\n");
    io::write_text(out / "comparison.csv", harness::to_csv(t));
    io::write_text(out / "comparison.md", harness::to_markdown(t));
    std::cout << harness::to_markdown(t);
  }
  else if (bench->parsed())
  {
    const harness::Dataset d = harness::load_dataset(dataset_dir);
    const nets::Checkpoint c = nets::load_checkpoint(checkpoint_dir);
    harness::RuntimeOptions opt;
    opt.n_trials = trials;
    const json bs = section(cfg, "bench_runtime");
    opt.fem_samples = bs.value("fem_samples", opt.fem_samples);
    opt.inference_samples = bs.value("inference_samples", opt.inference_samples);
    opt.batch_size = bs.value("batch_size", opt.batch_size);
    const harness::RuntimeReport r = harness::bench_runtime(d, c, opt);
    if (!g.out_dir.empty())
    {
      fs::create_directories(g.out_dir);
      io::write_text(fs::path(g.out_dir) / "runtime.json", harness::to_json(r).dump(2) + "\n");
    }
    print(harness::to_json(r));
  }
  else if (cons_eval->parsed())
  {
    if (!temp_k && !temp_c)
    {
      throw InputError("constitutive eval needs --temperature-k or --temperature-c");
    }
    const double t = temp_k ? *temp_k : *temp_c + 273.15;
    const constitutive::ConstitutiveState s{stress, strain, t, pct_c};
    const auto coef = constitutive::coefficients(t, pct_c);
    const double rate = constitutive::inelastic_strain_rate(s);
    print({{"stress_mpa", stress},
           {"inelastic_strain", strain},
           {"temperature_k", t},
           {"pct_c", pct_c},
           {"coefficients", {{"q", coef.q}, {"f1", coef.f1}, {"f2", coef.f2}, {"f3", coef.f3}, {"fc", coef.fc}}},
           {"in_calibrated_range", constitutive::in_calibrated_range(t)},
           {"inelastic_strain_rate", rate},
           {"residual", rate - constitutive::kozlowski_rhs(s, coef, rate)}});
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  try
  {
    return run(argc, argv);
  }
  catch (const Error &e)
  {
    std::cerr << json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}}.dump() << "\n";
  }
  catch (const json::exception &e)
  {
    std::cerr << json{{"error", {{"kind", "InputError"}, {"message", e.what()}}}}.dump() << "\n";
  }
  catch (const std::exception &e)
  {
    std::cerr << json{{"error", {{"kind", "InternalError"}, {"message", e.what()}}}}.dump() << "\n";
  }
  return 1;
}
