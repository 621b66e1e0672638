// SPDX-License-Identifier: Apache-2.0

#include "opbench/operator_nets/architecture.hpp"

#include <numeric>

#include "opbench/autodiff/layers.hpp"
#include "opbench/errors.hpp"

namespace opbench::nets
{

std::string to_string(Family f)
{
  return f == Family::deeponet ? "deeponet" : "s_deeponet";
}

std::string to_string(BranchMode m)
{
  return m == BranchMode::single ? "single" : "multi";
}

Family parse_family(const std::string &s)
{
  if (s == "deeponet") return Family::deeponet;
  if (s == "s_deeponet") return Family::s_deeponet;
  throw SpecError("unknown architecture family '" + s + "'");
}

BranchMode parse_branch_mode(const std::string &s)
{
  if (s == "single") return BranchMode::single;
  if (s == "multi") return BranchMode::multi;
  throw SpecError("unknown branch mode '" + s + "'");
}

void ArchitectureSpec::validate() const
{
  if (n_inputs == 0 || sensor_counts.size() != n_inputs)
  {
    throw SpecError("sensor_counts must list one entry per input");
  }
  for (auto s : sensor_counts)
  {
    if (s == 0)
    {
      throw SpecError("sensor counts must be positive");
    }
  }
  if (hidden_dim == 0 || n_output_fields == 0 || trunk_input_dim == 0)
  {
    throw SpecError("hidden_dim, n_output_fields and trunk_input_dim must be positive");
  }
  if (!branch_output_dims.empty())
  {
    if (branch_output_dims.size() != n_branches())
    {
      throw SpecError("branch_output_dims must list one entry per branch");
    }
    for (auto d : branch_output_dims)
    {
      if (d != branch_output_dims.front())
      {
        throw SpecError("multi-branch outputs must have equal widths for the Hadamard product");
      }
      if (d != hidden_dim)
      {
        throw SpecError("branch output width " + std::to_string(d) + " differs from hidden_dim " +
                        std::to_string(hidden_dim));
      }
    }
  }
  if (family == Family::s_deeponet)
  {
    if (gru_hidden == 0)
    {
      throw SpecError("gru_hidden must be positive");
    }
    for (auto s : sensor_counts)
    {
      if (s != sensor_counts.front())
      {
        throw SpecError("S-DeepONet inputs must share one sequence length");
      }
    }
  }
  for (auto w : branch_widths)
  {
    if (w == 0) throw SpecError("branch widths must be positive");
  }
  for (auto w : trunk_widths)
  {
    if (w == 0) throw SpecError("trunk widths must be positive");
  }
}

std::size_t ArchitectureSpec::branch_output_dim(std::size_t branch) const
{
  return branch_output_dims.empty() ? hidden_dim : branch_output_dims.at(branch);
}

std::size_t ArchitectureSpec::branch_input_dim(std::size_t branch) const
{
  if (family == Family::s_deeponet)
  {
    return branch_mode == BranchMode::single ? n_inputs : 1;
  }
  if (branch_mode == BranchMode::single)
  {
    return std::accumulate(sensor_counts.begin(), sensor_counts.end(), std::size_t{0});
  }
  return sensor_counts.at(branch);
}

std::size_t ArchitectureSpec::parameter_count() const
{
  std::size_t n = 0;
  for (std::size_t b = 0; b < n_branches(); ++b)
  {
    if (family == Family::deeponet)
    {
      std::vector<std::size_t> widths{branch_input_dim(b)};
      widths.insert(widths.end(), branch_widths.begin(), branch_widths.end());
      widths.push_back(branch_output_dim(b));
      n += ad::mlp_parameter_count(widths);
    }
    else
    {
      n += ad::gru_parameter_count(branch_input_dim(b), gru_hidden);
      n += ad::gru_parameter_count(gru_hidden, gru_hidden);
      n += ad::affine_parameter_count(gru_hidden, branch_output_dim(b));
    }
  }
  std::vector<std::size_t> trunk{trunk_input_dim};
  trunk.insert(trunk.end(), trunk_widths.begin(), trunk_widths.end());
  trunk.push_back(hidden_dim * n_output_fields);
  n += ad::mlp_parameter_count(trunk);
  return n + n_output_fields;
}

void to_json(nlohmann::json &j, const ArchitectureSpec &s)
{
  j = nlohmann::json{{"family", to_string(s.family)},
                     {"branch_mode", to_string(s.branch_mode)},
                     {"n_inputs", s.n_inputs},
                     {"sensor_counts", s.sensor_counts},
                     {"hidden_dim", s.hidden_dim},
                     {"n_output_fields", s.n_output_fields},
                     {"branch_widths", s.branch_widths},
                     {"branch_output_dims", s.branch_output_dims},
                     {"trunk_widths", s.trunk_widths},
                     {"trunk_input_dim", s.trunk_input_dim},
                     {"activation", ad::to_string(s.activation)},
                     {"gru_hidden", s.gru_hidden},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json &j, ArchitectureSpec &s)
{
  ArchitectureSpec d;
  s.family = parse_family(j.value("family", to_string(d.family)));
  s.branch_mode = parse_branch_mode(j.value("branch_mode", to_string(d.branch_mode)));
  s.n_inputs = j.value("n_inputs", d.n_inputs);
  s.sensor_counts = j.value("sensor_counts", d.sensor_counts);
  s.hidden_dim = j.value("hidden_dim", d.hidden_dim);
  s.n_output_fields = j.value("n_output_fields", d.n_output_fields);
  s.branch_widths = j.value("branch_widths", d.branch_widths);
  s.branch_output_dims = j.value("branch_output_dims", d.branch_output_dims);
  s.trunk_widths = j.value("trunk_widths", d.trunk_widths);
  s.trunk_input_dim = j.value("trunk_input_dim", d.trunk_input_dim);
  s.activation = ad::parse_activation(j.value("activation", ad::to_string(d.activation)));
  s.gru_hidden = j.value("gru_hidden", d.gru_hidden);
  s.seed = j.value("seed", d.seed);
}

}  // namespace opbench::nets
