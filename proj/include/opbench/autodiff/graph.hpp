// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "opbench/autodiff/parameter_store.hpp"
#include "opbench/autodiff/tensor.hpp"

namespace opbench::ad
{

class Graph;

// Handle to a node of a Graph. Cheap to copy; only valid while its graph lives.
class Var
{
public:
  Var() = default;

  Graph *graph() const noexcept { return graph_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return graph_ != nullptr; }

  const Tensor &value() const;
  const Shape &shape() const { return value().shape(); }

private:
  friend class Graph;
  Var(Graph *g, std::size_t id) : graph_(g), id_(id) {}

  Graph *graph_ = nullptr;
  std::size_t id_ = 0;
};

/**
 * Reverse-mode tape. Nodes are appended in evaluation order, so the tape is a
 * topological order and backward() is a single reverse sweep.
 *
 * A graph may bind one ParameterStore; parameter() nodes read from it and
 * gradients() returns a store-shaped gradient after backward().
 */
class Graph
{
public:
  using Backward = std::function<void(Graph &, std::size_t self)>;

  Graph() = default;
  // With track_gradients = false no backward closures are recorded; used for
  // inference.
  explicit Graph(bool track_gradients) : track_gradients_(track_gradients) {}
  Graph(const Graph &) = delete;
  Graph &operator=(const Graph &) = delete;

  Var input(Tensor value);
  Var parameter(const ParameterStore &store, const std::string &name);

  // Used by ops: appends a node whose gradient is propagated by `backward`.
  // `backward` is only invoked when the node received a gradient and
  // `requires_grad` is true.
  Var record(Tensor value, bool requires_grad, Backward backward);

  const Tensor &value(Var v) const { return nodes_[v.id()].value; }
  const Tensor &value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Gradient buffer of a node, zero-initialized on first access.
  Tensor &grad(std::size_t id);
  Tensor &grad(Var v) { return grad(v.id()); }
  bool has_grad(Var v) const { return !nodes_[v.id()].grad.empty() || nodes_[v.id()].value.empty(); }

  // Seeds d(root)/d(root) = 1; root must hold exactly one element.
  void backward(Var root);

  // Gradients of every bound parameter, zero for parameters not on the tape.
  ParameterStore gradients() const;

  std::size_t size() const noexcept { return nodes_.size(); }

  // Checks that `v` belongs to this graph; throws GraphError naming `op`.
  void check_owner(Var v, const char *op) const;

private:
  struct Node
  {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    Backward backward;
    std::ptrdiff_t parameter_index = -1;
  };

  std::vector<Node> nodes_;
  const ParameterStore *store_ = nullptr;
  bool track_gradients_ = true;
};

}  // namespace opbench::ad
