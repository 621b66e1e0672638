// SPDX-License-Identifier: Apache-2.0

#include "opbench/harness/evaluation.hpp"

#include <chrono>
#include <cstdio>
#include <memory>

#include "opbench/errors.hpp"
#include "opbench/io/binary.hpp"

namespace opbench::harness
{

namespace
{

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pct_label(double p)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

}  // namespace

void to_json(nlohmann::json &j, const EvaluateOptions &o)
{
  j = nlohmann::json{{"split_seed", o.split_seed},
                     {"train_fraction", o.train_fraction},
                     {"percentiles", o.percentiles},
                     {"bins", o.bins},
                     {"batch_size", o.batch_size}};
}

void from_json(const nlohmann::json &j, EvaluateOptions &o)
{
  EvaluateOptions d;
  o.split_seed = j.value("split_seed", d.split_seed);
  o.train_fraction = j.value("train_fraction", d.train_fraction);
  o.percentiles = j.value("percentiles", d.percentiles);
  o.bins = j.value("bins", d.bins);
  o.batch_size = j.value("batch_size", d.batch_size);
}

nlohmann::json metrics_json(const MetricsReport &r)
{
  nlohmann::json fields = nlohmann::json::array();
  for (const auto &f : r.fields)
  {
    nlohmann::json l2 = nlohmann::json::array();
    for (const auto &v : f.l2)
    {
      l2.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    }
    nlohmann::json pct = nlohmann::json::array();
    for (const auto &p : f.percentiles)
    {
      pct.push_back({{"percentile", p.percentile},
                     {"rank", p.rank},
                     {"sample", r.test_indices[p.sample]},
                     {"l2", p.error}});
    }
    fields.push_back({{"name", f.name},
                      {"mean_l2", f.mean_l2},
                      {"mean_mae", f.mean_mae},
                      {"n_degenerate", f.n_degenerate},
                      {"l2", l2},
                      {"mae", f.mae},
                      {"percentiles", pct},
                      {"histogram", {{"edges", f.l2_histogram.edges}, {"counts", f.l2_histogram.counts}}}});
  }
  return {{"benchmark", r.benchmark}, {"test_indices", r.test_indices}, {"fields", fields}};
}

nlohmann::json timings_json(const Timings &t)
{
  return {{"train_seconds", t.train_seconds},
          {"inference_seconds_per_sample", t.inference_seconds_per_sample},
          {"fem_seconds_per_sample", t.fem_seconds_per_sample}};
}

MetricsReport evaluate_predictions(const Dataset &dataset, const std::vector<std::size_t> &test_indices,
                                   const PredictFn &predict, const EvaluateOptions &options)
{
  if (test_indices.empty())
  {
    throw HarnessError("evaluation needs at least one test sample");
  }
  const auto names = dataset.field_names();
  const std::size_t c = names.size();
  const std::size_t p = dataset.n_steps() * dataset.n_nodes();
  MetricsReport r;
  r.benchmark = to_string(dataset.benchmark());
  r.test_indices = test_indices;
  r.fields.resize(c);
  for (std::size_t f = 0; f < c; ++f)
  {
    r.fields[f].name = names[f];
  }

  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  double predict_seconds = 0.0;
  for (std::size_t start = 0; start < test_indices.size(); start += batch)
  {
    const std::vector<std::size_t> chunk(
        test_indices.begin() + static_cast<std::ptrdiff_t>(start),
        test_indices.begin() + static_cast<std::ptrdiff_t>(std::min(test_indices.size(), start + batch)));
    const auto t0 = std::chrono::steady_clock::now();
    const ad::Tensor pred = predict(chunk);
    predict_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (pred.rank() != 3 || pred.dim(0) != chunk.size() || pred.dim(1) != c || pred.dim(2) != p)
    {
      throw HarnessError("predictions have shape " + ad::to_string(pred.shape()) + ", expected [" +
                         std::to_string(chunk.size()) + ", " + std::to_string(c) + ", " + std::to_string(p) + "]");
    }
    for (std::size_t b = 0; b < chunk.size(); ++b)
    {
      for (std::size_t f = 0; f < c; ++f)
      {
        const std::vector<double> target = dataset.field(f, chunk[b]);
        const std::span<const double> yp(pred.ptr() + (b * c + f) * p, p);
        r.fields[f].l2.push_back(l2_relative_error(target, yp));
        r.fields[f].mae.push_back(mae(target, yp));
      }
    }
  }
  r.timings.inference_seconds_per_sample = predict_seconds / static_cast<double>(test_indices.size());

  for (auto &f : r.fields)
  {
    std::vector<double> valid;
    std::vector<std::size_t> valid_pos;
    for (std::size_t i = 0; i < f.l2.size(); ++i)
    {
      if (f.l2[i])
      {
        valid.push_back(*f.l2[i]);
        valid_pos.push_back(i);
      }
    }
    f.n_degenerate = f.l2.size() - valid.size();
    double s = 0.0;
    for (double v : valid)
    {
      s += v;
    }
    f.mean_l2 = valid.empty() ? 0.0 : s / static_cast<double>(valid.size());
    double m = 0.0;
    for (double v : f.mae)
    {
      m += v;
    }
    f.mean_mae = m / static_cast<double>(f.mae.size());
    if (!valid.empty())
    {
      f.percentiles = select_percentiles(valid, options.percentiles);
      for (auto &e : f.percentiles)
      {
        e.sample = valid_pos[e.sample];
      }
    }
    f.l2_histogram = histogram(valid, options.bins);
  }
  return r;
}

PredictFn model_predictor(const nets::OperatorModel &model, const Dataset &dataset)
{
  auto predictor = std::make_shared<nets::FieldPredictor>(model, space_time_coords(dataset));
  return [predictor, &dataset](const std::vector<std::size_t> &samples)
  { return predictor->predict(dataset.inputs(samples)); };
}

MetricsReport evaluate(const nets::Checkpoint &checkpoint, const Dataset &dataset, const EvaluateOptions &options)
{
  const std::string expected = to_string(dataset.benchmark());
  const std::string got = checkpoint.metadata.value("benchmark", std::string());
  if (got != expected)
  {
    throw HarnessError("checkpoint benchmark '" + got + "' does not match dataset benchmark '" + expected + "'");
  }
  const auto split = nets::train_test_split(dataset.n_samples(), options.split_seed, options.train_fraction);
  return evaluate_predictions(dataset, split.test, model_predictor(checkpoint.model, dataset), options);
}

void write_report(const std::filesystem::path &dir, const MetricsReport &report, const Dataset &dataset,
                  const PredictFn &predict)
{
  std::filesystem::create_directories(dir);
  io::write_text(dir / "metrics.json", metrics_json(report).dump(2) + "\n");
  io::write_text(dir / "timings.json", timings_json(report.timings).dump(2) + "\n");

  std::string per_sample = "sample,field,l2,mae,degenerate\n";
  for (const auto &f : report.fields)
  {
    for (std::size_t i = 0; i < f.l2.size(); ++i)
    {
      per_sample += std::to_string(report.test_indices[i]) + "," + f.name + "," + (f.l2[i] ? num(*f.l2[i]) : "") +
                    "," + num(f.mae[i]) + "," + (f.l2[i] ? "0" : "1") + "\n";
    }
  }
  io::write_text(dir / "per_sample.csv", per_sample);

  std::string pct = "field,percentile,rank,sample,l2\n";
  for (const auto &f : report.fields)
  {
    for (const auto &p : f.percentiles)
    {
      pct += f.name + "," + pct_label(p.percentile) + "," + std::to_string(p.rank) + "," +
             std::to_string(report.test_indices[p.sample]) + "," + num(p.error) + "\n";
    }
    std::string hist = "bin_low,bin_high,count\n";
    for (std::size_t b = 0; b < f.l2_histogram.counts.size(); ++b)
    {
      hist += num(f.l2_histogram.edges[b]) + "," + num(f.l2_histogram.edges[b + 1]) + "," +
              std::to_string(f.l2_histogram.counts[b]) + "\n";
    }
    io::write_text(dir / ("histogram_" + f.name + ".csv"), hist);
  }
  io::write_text(dir / "percentiles.csv", pct);

  const nets::QueryBatch coords = space_time_coords(dataset);
  const std::size_t p = coords.size();
  const std::size_t c = report.fields.size();
  for (std::size_t f = 0; f < c; ++f)
  {
    for (const auto &e : report.fields[f].percentiles)
    {
      const std::size_t sample = report.test_indices[e.sample];
      const ad::Tensor pred = predict({sample});
      const std::vector<double> target = dataset.field(f, sample);
      std::string csv = "x,t,target,prediction\n";
      for (std::size_t j = 0; j < p; ++j)
      {
        const auto row = static_cast<Eigen::Index>(j);
        csv += num(coords.coords(row, 0)) + "," + num(coords.coords(row, 1)) + "," + num(target[j]) + "," +
               num(pred[f * p + j]) + "\n";
      }
      io::write_text(dir / ("exemplar_p" + pct_label(e.percentile) + "_" + report.fields[f].name + ".csv"), csv);
    }
  }
}

}  // namespace opbench::harness
