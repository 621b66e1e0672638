// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "opbench/autodiff/parameter_store.hpp"

namespace opbench::ad
{

struct AdamState
{
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  // One moment vector per store entry, matching entry sizes.
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

AdamState make_adam_state(const ParameterStore &params, double learning_rate = 1e-3);

// Bias-corrected Adam update:
//   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2
//   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
// `learning_rate` < 0 uses state.learning_rate.
void adam_step(ParameterStore &params, const ParameterStore &gradients, AdamState &state,
               double learning_rate = -1.0);

}  // namespace opbench::ad
