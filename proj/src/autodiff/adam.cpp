// SPDX-License-Identifier: Apache-2.0

#include "opbench/autodiff/adam.hpp"

#include <cmath>

#include "opbench/errors.hpp"

namespace opbench::ad
{

AdamState make_adam_state(const ParameterStore &params, double learning_rate)
{
  AdamState s;
  s.learning_rate = learning_rate;
  for (const auto &e : params.entries())
  {
    s.first_moment.emplace_back(e.value.size(), 0.0);
    s.second_moment.emplace_back(e.value.size(), 0.0);
  }
  return s;
}

void adam_step(ParameterStore &params, const ParameterStore &gradients, AdamState &state,
               double learning_rate)
{
  if (gradients.size() != params.size() || state.first_moment.size() != params.size())
  {
    throw GraphError("adam_step", "parameter, gradient and moment layouts differ");
  }
  const double lr = learning_rate < 0.0 ? state.learning_rate : learning_rate;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k)
  {
    auto &theta = params.entries()[k].value;
    const auto &g = gradients.entries()[k].value;
    auto &m = state.first_moment[k];
    auto &v = state.second_moment[k];
    if (g.size() != theta.size() || m.size() != theta.size())
    {
      throw GraphError("adam_step", "shape mismatch for '" + params.entries()[k].name + "'");
    }
    for (std::size_t i = 0; i < theta.size(); ++i)
    {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

}  // namespace opbench::ad
