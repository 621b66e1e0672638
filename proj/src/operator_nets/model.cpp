// SPDX-License-Identifier: Apache-2.0

#include "opbench/operator_nets/model.hpp"

#include <cmath>
#include <string>

#include "opbench/autodiff/layers.hpp"
#include "opbench/autodiff/ops.hpp"
#include "opbench/errors.hpp"
#include "opbench/field_gen/rng.hpp"

namespace opbench::nets
{

namespace
{

std::string branch_prefix(std::size_t b)
{
  return "branch" + std::to_string(b);
}

std::size_t trunk_layers(const ArchitectureSpec &spec)
{
  return spec.trunk_widths.size() + 1;
}

std::size_t deeponet_branch_layers(const ArchitectureSpec &spec)
{
  return spec.branch_widths.size() + 1;
}

}  // namespace

bool AffineNorm::valid() const noexcept
{
  return std::isfinite(shift) && std::isfinite(scale) && scale != 0.0;
}

Normalization Normalization::identity(const ArchitectureSpec &spec)
{
  Normalization n;
  n.inputs.assign(spec.n_inputs, AffineNorm{});
  n.outputs.assign(spec.n_output_fields, AffineNorm{});
  n.coord_low.assign(spec.trunk_input_dim, -1.0);
  n.coord_high.assign(spec.trunk_input_dim, 1.0);
  return n;
}

void Normalization::validate(const ArchitectureSpec &spec) const
{
  if (inputs.size() != spec.n_inputs || outputs.size() != spec.n_output_fields ||
      coord_low.size() != spec.trunk_input_dim || coord_high.size() != spec.trunk_input_dim)
  {
    throw SpecError("normalization statistics do not match the architecture");
  }
  for (const auto &n : inputs)
  {
    if (!n.valid()) throw SpecError("input normalization must be finite with nonzero scale");
  }
  for (const auto &n : outputs)
  {
    if (!n.valid()) throw SpecError("output normalization must be finite with nonzero scale");
  }
  for (std::size_t a = 0; a < coord_low.size(); ++a)
  {
    if (!std::isfinite(coord_low[a]) || !std::isfinite(coord_high[a]) || !(coord_high[a] > coord_low[a]))
    {
      throw SpecError("coordinate bounds must be finite with high > low");
    }
  }
}

double Normalization::coord_to_unit(std::size_t axis, double x) const
{
  return 2.0 * (x - coord_low[axis]) / (coord_high[axis] - coord_low[axis]) - 1.0;
}

void to_json(nlohmann::json &j, const AffineNorm &n)
{
  j = nlohmann::json{{"shift", n.shift}, {"scale", n.scale}};
}

void from_json(const nlohmann::json &j, AffineNorm &n)
{
  n.shift = j.at("shift").get<double>();
  n.scale = j.at("scale").get<double>();
}

void to_json(nlohmann::json &j, const Normalization &n)
{
  j = nlohmann::json{{"inputs", n.inputs}, {"outputs", n.outputs}, {"coord_low", n.coord_low},
                     {"coord_high", n.coord_high}};
}

void from_json(const nlohmann::json &j, Normalization &n)
{
  n.inputs = j.at("inputs").get<std::vector<AffineNorm>>();
  n.outputs = j.at("outputs").get<std::vector<AffineNorm>>();
  n.coord_low = j.at("coord_low").get<std::vector<double>>();
  n.coord_high = j.at("coord_high").get<std::vector<double>>();
}

OperatorModel build_model(const ArchitectureSpec &spec)
{
  spec.validate();
  OperatorModel m;
  m.spec = spec;
  m.norm = Normalization::identity(spec);
  field_gen::CounterRng rng(field_gen::derive_seed(spec.seed, 0x6d6f64656cULL));
  for (std::size_t b = 0; b < spec.n_branches(); ++b)
  {
    const std::string p = branch_prefix(b);
    if (spec.family == Family::deeponet)
    {
      std::vector<std::size_t> widths{spec.branch_input_dim(b)};
      widths.insert(widths.end(), spec.branch_widths.begin(), spec.branch_widths.end());
      widths.push_back(spec.branch_output_dim(b));
      ad::add_mlp(m.params, p, widths, rng);
    }
    else
    {
      ad::add_gru(m.params, p + ".encoder", spec.branch_input_dim(b), spec.gru_hidden, rng);
      ad::add_gru(m.params, p + ".decoder", spec.gru_hidden, spec.gru_hidden, rng);
      ad::add_affine(m.params, p + ".head", spec.gru_hidden, spec.branch_output_dim(b), rng);
    }
  }
  std::vector<std::size_t> trunk{spec.trunk_input_dim};
  trunk.insert(trunk.end(), spec.trunk_widths.begin(), spec.trunk_widths.end());
  trunk.push_back(spec.hidden_dim * spec.n_output_fields);
  ad::add_mlp(m.params, "trunk", trunk, rng);
  m.params.add("beta", ad::Tensor({spec.n_output_fields}));
  return m;
}

std::size_t count_outside_domain(const OperatorModel &model, const QueryBatch &q)
{
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < q.coords.rows(); ++i)
  {
    for (Eigen::Index a = 0; a < q.coords.cols(); ++a)
    {
      const double x = q.coords(i, a);
      const auto ax = static_cast<std::size_t>(a);
      if (x < model.norm.coord_low[ax] || x > model.norm.coord_high[ax])
      {
        ++n;
        break;
      }
    }
  }
  return n;
}

void check_inputs(const ArchitectureSpec &spec, const std::vector<ad::Tensor> &inputs)
{
  const char *what = spec.family == Family::deeponet ? "sensor count" : "sequence length";
  if (inputs.size() != spec.n_inputs)
  {
    throw InputError("expected " + std::to_string(spec.n_inputs) + " input functions, got " +
                     std::to_string(inputs.size()));
  }
  for (std::size_t i = 0; i < inputs.size(); ++i)
  {
    if (inputs[i].rank() != 2 || inputs[i].dim(1) != spec.sensor_counts[i])
    {
      throw InputError(std::string(what) + " mismatch for input " + std::to_string(i) + ": expected " +
                       std::to_string(spec.sensor_counts[i]) + ", got shape " + ad::to_string(inputs[i].shape()));
    }
    if (inputs[i].dim(0) != inputs[0].dim(0))
    {
      throw InputError("input functions disagree on batch size");
    }
  }
}

std::vector<ad::Tensor> normalize_inputs(const OperatorModel &model, const std::vector<ad::Tensor> &inputs)
{
  check_inputs(model.spec, inputs);
  std::vector<ad::Tensor> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i)
  {
    ad::Tensor t = inputs[i];
    t.requires_grad = false;
    const AffineNorm &n = model.norm.inputs[i];
    for (auto &v : t.data())
    {
      v = n.normalize(v);
    }
    out.push_back(std::move(t));
  }
  return out;
}

ad::Tensor normalize_coords(const OperatorModel &model, const QueryBatch &q)
{
  if (q.dim() != model.spec.trunk_input_dim)
  {
    throw InputError("query dimension " + std::to_string(q.dim()) + " differs from trunk input dimension " +
                     std::to_string(model.spec.trunk_input_dim));
  }
  ad::Tensor t({q.size(), q.dim()});
  for (std::size_t i = 0; i < q.size(); ++i)
  {
    for (std::size_t a = 0; a < q.dim(); ++a)
    {
      t.at(i, a) = model.norm.coord_to_unit(a, q.coords(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)));
    }
  }
  return t;
}

namespace
{

ad::Var deeponet_branch(ad::Graph &g, const OperatorModel &model, const std::vector<ad::Tensor> &in)
{
  const auto &spec = model.spec;
  const std::size_t layers = deeponet_branch_layers(spec);
  if (spec.branch_mode == BranchMode::single)
  {
    ad::Var x = g.input(in[0]);
    for (std::size_t i = 1; i < in.size(); ++i)
    {
      x = ad::concat_cols(x, g.input(in[i]));
    }
    return ad::mlp_forward(g, model.params, branch_prefix(0), layers, x, spec.activation, false);
  }
  ad::Var merged;
  for (std::size_t b = 0; b < in.size(); ++b)
  {
    ad::Var out = ad::mlp_forward(g, model.params, branch_prefix(b), layers, g.input(in[b]), spec.activation, false);
    merged = merged.valid() ? ad::mul(merged, out) : out;
  }
  return merged;
}

// Encoder over all steps from a zero state, one decoder step fed the final
// encoder state as both input and state, then the affine head.
ad::Var gru_branch(ad::Graph &g, const OperatorModel &model, const std::string &prefix,
                   const std::vector<const ad::Tensor *> &features)
{
  const std::size_t batch = features[0]->dim(0);
  const std::size_t steps = features[0]->dim(1);
  const std::size_t nf = features.size();
  const std::size_t hidden = model.spec.gru_hidden;
  const ad::GruVars enc = ad::gru_parameters(g, model.params, prefix + ".encoder");
  ad::Var h = g.input(ad::Tensor({batch, hidden}));
  for (std::size_t t = 0; t < steps; ++t)
  {
    ad::Tensor xt({batch, nf});
    for (std::size_t b = 0; b < batch; ++b)
    {
      for (std::size_t f = 0; f < nf; ++f)
      {
        xt.at(b, f) = features[f]->at(b, t);
      }
    }
    h = ad::gru_cell(g.input(std::move(xt)), h, enc.w_input, enc.w_hidden, enc.bias);
  }
  const ad::GruVars dec = ad::gru_parameters(g, model.params, prefix + ".decoder");
  const ad::Var d = ad::gru_cell(h, h, dec.w_input, dec.w_hidden, dec.bias);
  return ad::affine_forward(g, model.params, prefix + ".head", d);
}

ad::Var s_deeponet_branch(ad::Graph &g, const OperatorModel &model, const std::vector<ad::Tensor> &in)
{
  if (model.spec.branch_mode == BranchMode::single)
  {
    std::vector<const ad::Tensor *> all;
    for (const auto &t : in)
    {
      all.push_back(&t);
    }
    return gru_branch(g, model, branch_prefix(0), all);
  }
  ad::Var merged;
  for (std::size_t b = 0; b < in.size(); ++b)
  {
    ad::Var out = gru_branch(g, model, branch_prefix(b), {&in[b]});
    merged = merged.valid() ? ad::mul(merged, out) : out;
  }
  return merged;
}

}  // namespace

ad::Var branch_forward(ad::Graph &g, const OperatorModel &model, const std::vector<ad::Tensor> &normalized_inputs)
{
  check_inputs(model.spec, normalized_inputs);
  return model.spec.family == Family::deeponet ? deeponet_branch(g, model, normalized_inputs)
                                               : s_deeponet_branch(g, model, normalized_inputs);
}

ad::Var trunk_forward(ad::Graph &g, const OperatorModel &model, const ad::Tensor &unit_coords)
{
  if (unit_coords.rank() != 2 || unit_coords.dim(1) != model.spec.trunk_input_dim)
  {
    throw InputError("trunk coordinates must be [n, " + std::to_string(model.spec.trunk_input_dim) + "]");
  }
  return ad::mlp_forward(g, model.params, "trunk", trunk_layers(model.spec), g.input(unit_coords),
                         model.spec.activation, true);
}

ad::Var network_forward(ad::Graph &g, const OperatorModel &model, const std::vector<ad::Tensor> &normalized_inputs,
                        const ad::Tensor &unit_coords)
{
  const ad::Var b = branch_forward(g, model, normalized_inputs);
  const ad::Var t = trunk_forward(g, model, unit_coords);
  return ad::contraction(b, t, g.parameter(model.params, "beta"));
}

namespace
{

ad::Tensor denormalize_outputs(const OperatorModel &model, ad::Tensor out)
{
  const std::size_t batch = out.dim(0), c = out.dim(1), n = out.dim(2);
  for (std::size_t b = 0; b < batch; ++b)
  {
    for (std::size_t f = 0; f < c; ++f)
    {
      const AffineNorm &nm = model.norm.outputs[f];
      double *row = out.ptr() + (b * c + f) * n;
      for (std::size_t j = 0; j < n; ++j)
      {
        row[j] = nm.denormalize(row[j]);
      }
    }
  }
  return out;
}

}  // namespace

ad::Tensor forward(const OperatorModel &model, const std::vector<ad::Tensor> &inputs, const QueryBatch &queries)
{
  ad::Graph g(false);
  const ad::Var out = network_forward(g, model, normalize_inputs(model, inputs), normalize_coords(model, queries));
  return denormalize_outputs(model, out.value());
}

ad::Tensor forward_deeponet(const OperatorModel &model, const std::vector<ad::Tensor> &input_functions,
                            const QueryBatch &queries)
{
  if (model.spec.family != Family::deeponet)
  {
    throw InputError("forward_deeponet called on an S-DeepONet model");
  }
  return forward(model, input_functions, queries);
}

ad::Tensor forward_s_deeponet(const OperatorModel &model, const std::vector<ad::Tensor> &input_sequences,
                              const QueryBatch &queries)
{
  if (model.spec.family != Family::s_deeponet)
  {
    throw InputError("forward_s_deeponet called on a DeepONet model");
  }
  return forward(model, input_sequences, queries);
}

FieldPredictor::FieldPredictor(const OperatorModel &model, const QueryBatch &queries)
    : model_(model), n_queries_(queries.size())
{
  ad::Graph g(false);
  const ad::Tensor &trunk = trunk_forward(g, model_, normalize_coords(model_, queries)).value();
  const std::size_t h = model_.spec.hidden_dim;
  const std::size_t c = model_.spec.n_output_fields;
  Eigen::Map<const RowMatrix> t(trunk.ptr(), static_cast<Eigen::Index>(n_queries_), static_cast<Eigen::Index>(c * h));
  for (std::size_t f = 0; f < c; ++f)
  {
    trunk_t_.push_back(t.middleCols(static_cast<Eigen::Index>(f * h), static_cast<Eigen::Index>(h)).transpose());
  }
}

ad::Tensor FieldPredictor::predict(const std::vector<ad::Tensor> &inputs) const
{
  ad::Graph g(false);
  const ad::Tensor &b = branch_forward(g, model_, normalize_inputs(model_, inputs)).value();
  const std::size_t batch = b.dim(0);
  const std::size_t h = model_.spec.hidden_dim;
  const std::size_t c = trunk_t_.size();
  const ad::Tensor &beta = model_.params.at("beta");
  Eigen::Map<const RowMatrix> bm(b.ptr(), static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(h));
  ad::Tensor out({batch, c, n_queries_});
  const Eigen::OuterStride<> stride(static_cast<Eigen::Index>(c * n_queries_));
  for (std::size_t f = 0; f < c; ++f)
  {
    Eigen::Map<RowMatrix, 0, Eigen::OuterStride<>> of(out.ptr() + f * n_queries_, static_cast<Eigen::Index>(batch),
                                                     static_cast<Eigen::Index>(n_queries_), stride);
    of.noalias() = bm * trunk_t_[f];
    const AffineNorm &nm = model_.norm.outputs[f];
    of = ((of.array() + beta[f]) * nm.scale + nm.shift).matrix();
  }
  return out;
}

}  // namespace opbench::nets
