// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

#include "opbench/autodiff/graph.hpp"

namespace opbench::ad
{

enum class Activation
{
  identity,
  tanh,
  relu,
  sigmoid
};

Activation parse_activation(const std::string &name);
std::string to_string(Activation a);

// All 2-D operands are [rows, cols] row-major. Every op validates shapes and
// throws GraphError naming itself on mismatch.

Var matmul(Var a, Var b);                  // [m,k] x [k,n]
Var affine(Var x, Var weight, Var bias);   // x W + b, b broadcast over rows
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);                     // elementwise (Hadamard)
Var scale(Var a, double s);
Var tanh(Var a);
Var relu(Var a);
Var sigmoid(Var a);
Var activate(Var a, Activation act);
Var concat_cols(Var a, Var b);             // [m,k1] ++ [m,k2]
Var sum(Var a);                            // scalar [1]

// Row t of each sequence: [batch, steps, features] -> [batch, features].
Var time_step(Var sequence, std::size_t t);

/**
 * GRU cell with gate blocks ordered [update z | reset r | candidate n]:
 *   z = sigma(x Wz + h Uz + bz),  r = sigma(x Wr + h Ur + br)
 *   n = tanh(x Wn + (r * h) Un + bn),  h' = (1 - z) * h + z * n
 * Shapes: x [B,F], h [B,H], w_input [F,3H], w_hidden [H,3H], bias [3H].
 */
Var gru_cell(Var x, Var h, Var w_input, Var w_hidden, Var bias);

/**
 * Branch-trunk contraction with per-field bias:
 *   out[b, c, j] = sum_k branch[b, k] * trunk[j, c*H + k] + beta[c]
 * Shapes: branch [B,H], trunk [n, C*H], beta [C] -> out [B, C, n].
 */
Var contraction(Var branch, Var trunk, Var beta);

// mean((pred - target)^2) over all elements; target is a constant.
Var mse_loss(Var pred, const Tensor &target);

}  // namespace opbench::ad
