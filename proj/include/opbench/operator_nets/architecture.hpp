// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opbench/autodiff/ops.hpp"

namespace opbench::nets
{

enum class Family
{
  deeponet,    // feed-forward branch over sensor values
  s_deeponet,  // GRU encoder-decoder branch over input sequences
};

enum class BranchMode
{
  single,  // all inputs encoded jointly by one branch
  multi,   // one branch per input, joined by Hadamard product
};

std::string to_string(Family f);
std::string to_string(BranchMode m);
Family parse_family(const std::string &s);
BranchMode parse_branch_mode(const std::string &s);

struct ArchitectureSpec
{
  Family family = Family::deeponet;
  BranchMode branch_mode = BranchMode::single;
  std::size_t n_inputs = 2;
  // Sensors per input function (DeepONet) or sequence length (S-DeepONet).
  std::vector<std::size_t> sensor_counts{255, 255};
  std::size_t hidden_dim = 64;
  std::size_t n_output_fields = 1;
  // Hidden widths of each DeepONet branch; the output layer of width
  // hidden_dim is appended.
  std::vector<std::size_t> branch_widths{128, 128, 128};
  // Output width of each branch; empty means hidden_dim for every branch.
  std::vector<std::size_t> branch_output_dims;
  // Hidden widths of the trunk; the output layer hidden_dim * n_output_fields is appended.
  std::vector<std::size_t> trunk_widths{128, 128, 128};
  std::size_t trunk_input_dim = 2;
  ad::Activation activation = ad::Activation::tanh;
  std::size_t gru_hidden = 64;
  std::uint64_t seed = 0;

  // Throws SpecError.
  void validate() const;

  std::size_t n_branches() const noexcept { return branch_mode == BranchMode::single ? 1 : n_inputs; }
  std::size_t branch_output_dim(std::size_t branch) const;
  // Input width of branch b: summed sensors (DeepONet single), sensors of
  // input b (DeepONet multi), or features per time step (S-DeepONet).
  std::size_t branch_input_dim(std::size_t branch) const;

  // Closed-form trainable parameter count.
  std::size_t parameter_count() const;

  bool operator==(const ArchitectureSpec &) const = default;
};

void to_json(nlohmann::json &j, const ArchitectureSpec &spec);
void from_json(const nlohmann::json &j, ArchitectureSpec &spec);

}  // namespace opbench::nets
