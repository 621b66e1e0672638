// SPDX-License-Identifier: Apache-2.0

#include "opbench/operator_nets/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opbench/autodiff/adam.hpp"
#include "opbench/autodiff/ops.hpp"
#include "opbench/errors.hpp"
#include "opbench/field_gen/rng.hpp"
#include "opbench/io/binary.hpp"

namespace opbench::nets
{

void TrainingData::validate() const
{
  if (inputs.empty() || fields.empty())
  {
    throw InputError("training data needs at least one input and one field");
  }
  const std::size_t n = n_samples();
  if (n == 0)
  {
    throw InputError("training data is empty");
  }
  for (const auto &t : inputs)
  {
    if (t.rank() != 2 || t.dim(0) != n)
    {
      throw InputError("input arrays must be [N, sensors] with a common N");
    }
  }
  for (const auto &t : fields)
  {
    if (t.rank() != 2 || t.dim(0) != n || t.dim(1) != coords.size())
    {
      throw InputError("field arrays must be [N, n_points] matching the query grid");
    }
  }
}

std::vector<ad::Tensor> TrainingData::gather_inputs(const std::vector<std::size_t> &indices) const
{
  std::vector<ad::Tensor> out;
  for (const auto &t : inputs)
  {
    const std::size_t s = t.dim(1);
    ad::Tensor g({indices.size(), s});
    for (std::size_t i = 0; i < indices.size(); ++i)
    {
      std::copy_n(t.ptr() + indices[i] * s, s, g.ptr() + i * s);
    }
    out.push_back(std::move(g));
  }
  return out;
}

Split train_test_split(std::size_t n, std::uint64_t seed, double train_fraction)
{
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
  {
    throw SpecError("train fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  field_gen::CounterRng rng(field_gen::derive_seed(seed, 0x73706c6974ULL));
  for (std::size_t i = n; i > 1; --i)
  {
    std::swap(perm[i - 1], perm[rng.below(i)]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

void TrainConfig::validate() const
{
  if (batch_size == 0 || log_interval == 0 || decay_steps == 0)
  {
    throw SpecError("batch_size, log_interval and decay_steps must be positive");
  }
  if (!(learning_rate > 0.0) || !(decay_rate >= 0.0))
  {
    throw SpecError("learning_rate must be positive and decay_rate nonnegative");
  }
}

void to_json(nlohmann::json &j, const TrainConfig &c)
{
  j = nlohmann::json{{"epochs", c.epochs},
                     {"batch_size", c.batch_size},
                     {"n_query", c.n_query},
                     {"learning_rate", c.learning_rate},
                     {"decay_rate", c.decay_rate},
                     {"decay_steps", c.decay_steps},
                     {"log_interval", c.log_interval},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json &j, TrainConfig &c)
{
  TrainConfig d;
  c.epochs = j.value("epochs", d.epochs);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.n_query = j.value("n_query", d.n_query);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.decay_rate = j.value("decay_rate", d.decay_rate);
  c.decay_steps = j.value("decay_steps", d.decay_steps);
  c.log_interval = j.value("log_interval", d.log_interval);
  c.seed = j.value("seed", d.seed);
}

std::string config_hash(const TrainConfig &c)
{
  return io::sha256_hex(nlohmann::json(c).dump());
}

namespace
{

AffineNorm moments(const ad::Tensor &t, const std::vector<std::size_t> &samples)
{
  const std::size_t s = t.dim(1);
  double sum = 0.0;
  for (auto i : samples)
  {
    for (std::size_t j = 0; j < s; ++j)
    {
      sum += t[i * s + j];
    }
  }
  const double count = static_cast<double>(samples.size() * s);
  const double mean = sum / count;
  double sq = 0.0;
  for (auto i : samples)
  {
    for (std::size_t j = 0; j < s; ++j)
    {
      const double d = t[i * s + j] - mean;
      sq += d * d;
    }
  }
  const double sd = std::sqrt(sq / count);
  return {mean, sd > 0.0 && std::isfinite(sd) ? sd : 1.0};
}

}  // namespace

Normalization fit_normalization(const ArchitectureSpec &spec, const TrainingData &data,
                                const std::vector<std::size_t> &samples)
{
  data.validate();
  if (samples.empty())
  {
    throw InputError("normalization needs at least one sample");
  }
  if (data.inputs.size() != spec.n_inputs || data.fields.size() != spec.n_output_fields ||
      data.coords.dim() != spec.trunk_input_dim)
  {
    throw InputError("training data does not match the architecture");
  }
  Normalization n;
  for (const auto &t : data.inputs)
  {
    n.inputs.push_back(moments(t, samples));
  }
  for (const auto &t : data.fields)
  {
    n.outputs.push_back(moments(t, samples));
  }
  for (std::size_t a = 0; a < data.coords.dim(); ++a)
  {
    const auto col = data.coords.coords.col(static_cast<Eigen::Index>(a));
    double lo = col.minCoeff(), hi = col.maxCoeff();
    if (!(hi > lo))
    {
      hi = lo + 1.0;
    }
    n.coord_low.push_back(lo);
    n.coord_high.push_back(hi);
  }
  return n;
}

double evaluate_loss(const OperatorModel &model, const TrainingData &data, const std::vector<std::size_t> &samples)
{
  FieldPredictor predictor(model, data.coords);
  const std::size_t p = data.coords.size();
  const std::size_t c = data.fields.size();
  double sq = 0.0;
  constexpr std::size_t chunk = 16;
  for (std::size_t start = 0; start < samples.size(); start += chunk)
  {
    std::vector<std::size_t> idx(samples.begin() + static_cast<std::ptrdiff_t>(start),
                                 samples.begin() + static_cast<std::ptrdiff_t>(std::min(samples.size(), start + chunk)));
    const ad::Tensor pred = predictor.predict(data.gather_inputs(idx));
    for (std::size_t b = 0; b < idx.size(); ++b)
    {
      for (std::size_t f = 0; f < c; ++f)
      {
        const double scale = model.norm.outputs[f].scale;
        const double *pr = pred.ptr() + (b * c + f) * p;
        const double *tg = data.fields[f].ptr() + idx[b] * p;
        for (std::size_t j = 0; j < p; ++j)
        {
          const double d = (pr[j] - tg[j]) / scale;
          sq += d * d;
        }
      }
    }
  }
  return sq / static_cast<double>(samples.size() * c * p);
}

TrainResult train(OperatorModel &model, const TrainingData &data, const std::vector<std::size_t> &train_samples,
                  const TrainConfig &config, const ProgressFn &progress)
{
  config.validate();
  model.norm = fit_normalization(model.spec, data, train_samples);

  const std::size_t p = data.coords.size();
  const std::size_t c = data.fields.size();
  const std::size_t nq = config.n_query == 0 ? p : std::min(config.n_query, p);
  const std::size_t batch = std::min(config.batch_size, train_samples.size());

  std::vector<ad::Tensor> norm_inputs = normalize_inputs(model, data.inputs);
  std::vector<ad::Tensor> norm_fields;
  for (std::size_t f = 0; f < c; ++f)
  {
    ad::Tensor t = data.fields[f];
    for (auto &v : t.data())
    {
      v = model.norm.outputs[f].normalize(v);
    }
    norm_fields.push_back(std::move(t));
  }
  TrainingData norm_data{std::move(norm_inputs), {}, {}};
  const ad::Tensor unit_coords = normalize_coords(model, data.coords);
  const std::size_t d = unit_coords.dim(1);

  field_gen::CounterRng rng(field_gen::derive_seed(config.seed, 0x747261696eULL));
  std::vector<std::size_t> order = train_samples;
  std::size_t cursor = order.size();
  std::vector<std::size_t> points(p);
  std::iota(points.begin(), points.end(), std::size_t{0});

  ad::AdamState adam = ad::make_adam_state(model.params, config.learning_rate);
  TrainResult result;
  double interval_sum = 0.0;
  std::size_t interval_count = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch)
  {
    std::vector<std::size_t> idx(batch);
    for (auto &i : idx)
    {
      if (cursor == order.size())
      {
        for (std::size_t k = order.size(); k > 1; --k)
        {
          std::swap(order[k - 1], order[rng.below(k)]);
        }
        cursor = 0;
      }
      i = order[cursor++];
    }
    if (nq < p)
    {
      for (std::size_t k = 0; k < nq; ++k)
      {
        std::swap(points[k], points[k + rng.below(p - k)]);
      }
    }

    ad::Tensor coords({nq, d});
    for (std::size_t k = 0; k < nq; ++k)
    {
      std::copy_n(unit_coords.ptr() + points[k] * d, d, coords.ptr() + k * d);
    }
    ad::Tensor target({batch, c, nq});
    for (std::size_t b = 0; b < batch; ++b)
    {
      for (std::size_t f = 0; f < c; ++f)
      {
        const double *src = norm_fields[f].ptr() + idx[b] * p;
        double *dst = target.ptr() + (b * c + f) * nq;
        for (std::size_t k = 0; k < nq; ++k)
        {
          dst[k] = src[points[k]];
        }
      }
    }

    ad::Graph g;
    const ad::Var out = network_forward(g, model, norm_data.gather_inputs(idx), coords);
    const ad::Var loss = ad::mse_loss(out, target);
    const double value = loss.value()[0];
    if (!std::isfinite(value))
    {
      throw TrainingError("non-finite training loss", epoch);
    }
    g.backward(loss);
    const ad::ParameterStore grads = g.gradients();
    const double lr = config.learning_rate /
                      (1.0 + config.decay_rate * static_cast<double>(epoch) / static_cast<double>(config.decay_steps));
    ad::adam_step(model.params, grads, adam, lr);

    if (epoch == 0)
    {
      result.initial_loss = value;
    }
    interval_sum += value;
    ++interval_count;
    if ((epoch + 1) % config.log_interval == 0 || epoch + 1 == config.epochs)
    {
      const LossRecord rec{epoch + 1, interval_sum / static_cast<double>(interval_count)};
      result.history.push_back(rec);
      result.final_loss = rec.loss;
      if (progress)
      {
        progress(rec);
      }
      interval_sum = 0.0;
      interval_count = 0;
    }
  }
  return result;
}

}  // namespace opbench::nets
