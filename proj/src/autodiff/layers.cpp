// SPDX-License-Identifier: Apache-2.0

#include "opbench/autodiff/layers.hpp"

#include <cmath>

namespace opbench::ad
{

std::size_t mlp_parameter_count(const std::vector<std::size_t> &widths) noexcept
{
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i)
  {
    n += affine_parameter_count(widths[i], widths[i + 1]);
  }
  return n;
}

void add_affine(ParameterStore &store, const std::string &prefix, std::size_t in, std::size_t out,
                field_gen::CounterRng &rng)
{
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  Tensor w({in, out});
  for (auto &v : w.data())
  {
    v = rng.uniform(-limit, limit);
  }
  store.add(prefix + ".weight", std::move(w));
  store.add(prefix + ".bias", Tensor({out}));
}

void add_gru(ParameterStore &store, const std::string &prefix, std::size_t in, std::size_t hidden,
             field_gen::CounterRng &rng)
{
  const double limit = 1.0 / std::sqrt(static_cast<double>(hidden));
  Tensor wx({in, 3 * hidden});
  Tensor wh({hidden, 3 * hidden});
  for (auto &v : wx.data())
  {
    v = rng.uniform(-limit, limit);
  }
  for (auto &v : wh.data())
  {
    v = rng.uniform(-limit, limit);
  }
  store.add(prefix + ".w_input", std::move(wx));
  store.add(prefix + ".w_hidden", std::move(wh));
  store.add(prefix + ".bias", Tensor({3 * hidden}));
}

void add_mlp(ParameterStore &store, const std::string &prefix, const std::vector<std::size_t> &widths,
             field_gen::CounterRng &rng)
{
  for (std::size_t i = 0; i + 1 < widths.size(); ++i)
  {
    add_affine(store, prefix + "." + std::to_string(i), widths[i], widths[i + 1], rng);
  }
}

Var affine_forward(Graph &g, const ParameterStore &store, const std::string &prefix, Var x)
{
  return affine(x, g.parameter(store, prefix + ".weight"), g.parameter(store, prefix + ".bias"));
}

Var mlp_forward(Graph &g, const ParameterStore &store, const std::string &prefix, std::size_t n_layers,
                Var x, Activation act, bool activate_last)
{
  for (std::size_t i = 0; i < n_layers; ++i)
  {
    x = affine_forward(g, store, prefix + "." + std::to_string(i), x);
    if (i + 1 < n_layers || activate_last)
    {
      x = activate(x, act);
    }
  }
  return x;
}

GruVars gru_parameters(Graph &g, const ParameterStore &store, const std::string &prefix)
{
  return {g.parameter(store, prefix + ".w_input"), g.parameter(store, prefix + ".w_hidden"),
          g.parameter(store, prefix + ".bias")};
}

}  // namespace opbench::ad
