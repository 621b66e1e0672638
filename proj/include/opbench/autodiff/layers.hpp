// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "opbench/autodiff/graph.hpp"
#include "opbench/autodiff/ops.hpp"
#include "opbench/field_gen/rng.hpp"

namespace opbench::ad
{

// Closed-form parameter counts.
constexpr std::size_t affine_parameter_count(std::size_t in, std::size_t out) noexcept
{
  return in * out + out;
}

constexpr std::size_t gru_parameter_count(std::size_t in, std::size_t hidden) noexcept
{
  return 3 * (in * hidden + hidden * hidden + hidden);
}

// widths = {in, h1, ..., out}
std::size_t mlp_parameter_count(const std::vector<std::size_t> &widths) noexcept;

// Adds "<prefix>.weight" [in, out] (Glorot uniform) and "<prefix>.bias" [out] (zero).
void add_affine(ParameterStore &store, const std::string &prefix, std::size_t in, std::size_t out,
                field_gen::CounterRng &rng);

// Adds "<prefix>.w_input" [in, 3H], "<prefix>.w_hidden" [H, 3H] drawn uniform in
// +-1/sqrt(H), and a zero "<prefix>.bias" [3H].
void add_gru(ParameterStore &store, const std::string &prefix, std::size_t in, std::size_t hidden,
             field_gen::CounterRng &rng);

// Adds layers "<prefix>.0" ... "<prefix>.(L-1)" for widths {in, ..., out}.
void add_mlp(ParameterStore &store, const std::string &prefix, const std::vector<std::size_t> &widths,
             field_gen::CounterRng &rng);

Var affine_forward(Graph &g, const ParameterStore &store, const std::string &prefix, Var x);

// Activation after every layer; the last one only if `activate_last`.
Var mlp_forward(Graph &g, const ParameterStore &store, const std::string &prefix, std::size_t n_layers,
                Var x, Activation act, bool activate_last);

struct GruVars
{
  Var w_input;
  Var w_hidden;
  Var bias;
};

GruVars gru_parameters(Graph &g, const ParameterStore &store, const std::string &prefix);

}  // namespace opbench::ad
