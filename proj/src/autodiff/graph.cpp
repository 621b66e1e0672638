// SPDX-License-Identifier: Apache-2.0

#include "opbench/autodiff/graph.hpp"

#include "opbench/errors.hpp"

namespace opbench::ad
{

const Tensor &Var::value() const
{
  if (graph_ == nullptr)
  {
    throw GraphError("Var", "access through an unbound variable");
  }
  return graph_->value(*this);
}

Var Graph::input(Tensor value)
{
  const bool rg = value.requires_grad && track_gradients_;
  nodes_.push_back({std::move(value), Tensor(), rg, nullptr, -1});
  return Var(this, nodes_.size() - 1);
}

Var Graph::parameter(const ParameterStore &store, const std::string &name)
{
  if (store_ != nullptr && store_ != &store)
  {
    throw GraphError("parameter", "graph already bound to a different parameter store");
  }
  store_ = &store;
  const std::size_t index = store.index_of(name);
  nodes_.push_back({store.entries()[index].value, Tensor(), track_gradients_, nullptr,
                    static_cast<std::ptrdiff_t>(index)});
  return Var(this, nodes_.size() - 1);
}

Var Graph::record(Tensor value, bool requires_grad, Backward backward)
{
  requires_grad = requires_grad && track_gradients_;
  nodes_.push_back({std::move(value), Tensor(), requires_grad,
                    requires_grad ? std::move(backward) : Backward(), -1});
  return Var(this, nodes_.size() - 1);
}

Tensor &Graph::grad(std::size_t id)
{
  Node &n = nodes_[id];
  if (n.grad.size() != n.value.size() || n.grad.shape() != n.value.shape())
  {
    n.grad = Tensor::zeros_like(n.value);
  }
  return n.grad;
}

void Graph::backward(Var root)
{
  check_owner(root, "backward");
  if (value(root).size() != 1)
  {
    throw GraphError("backward", "root must be a scalar, got shape " + to_string(value(root).shape()));
  }
  for (auto &n : nodes_)
  {
    n.grad = Tensor();
  }
  grad(root.id())[0] = 1.0;
  for (std::size_t id = root.id() + 1; id-- > 0;)
  {
    Node &n = nodes_[id];
    if (n.backward && n.requires_grad && !n.grad.empty())
    {
      n.backward(*this, id);
    }
  }
}

ParameterStore Graph::gradients() const
{
  if (store_ == nullptr)
  {
    return {};
  }
  ParameterStore out = store_->zeros_like();
  for (const auto &n : nodes_)
  {
    if (n.parameter_index >= 0 && !n.grad.empty())
    {
      auto &dst = out.entries()[static_cast<std::size_t>(n.parameter_index)].value;
      for (std::size_t i = 0; i < dst.size(); ++i)
      {
        dst[i] += n.grad[i];
      }
    }
  }
  return out;
}

void Graph::check_owner(Var v, const char *op) const
{
  if (v.graph() != this || v.id() >= nodes_.size())
  {
    throw GraphError(op, "variable does not belong to this graph");
  }
}

}  // namespace opbench::ad
