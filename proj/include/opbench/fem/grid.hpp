// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace opbench::fem
{

// Uniform mesh of quadratic (3-node) Lagrange elements on [0, 1]. Element e
// owns nodes 2e, 2e+1, 2e+2.
class Grid1D
{
public:
  explicit Grid1D(std::size_t n_elements = 127);

  std::size_t n_elements() const noexcept { return n_elements_; }
  std::size_t n_nodes() const noexcept { return 2 * n_elements_ + 1; }
  double element_size() const noexcept { return 1.0 / static_cast<double>(n_elements_); }
  const std::vector<double> &nodes() const noexcept { return nodes_; }

  bool operator==(const Grid1D &other) const noexcept { return n_elements_ == other.n_elements_; }

private:
  std::size_t n_elements_;
  std::vector<double> nodes_;
};

// Uniform implicit time stepping; n_steps counts stored states including t = 0.
struct TimeScheme
{
  std::size_t n_steps = 101;
  double t_end = 1.0;

  double dt() const noexcept { return t_end / static_cast<double>(n_steps - 1); }
  double time(std::size_t step) const noexcept;
  std::vector<double> times() const;
  void validate() const;
};

struct DirichletBc
{
  double left = 0.0;
  double right = 0.0;
};

// Dirichlet data for every field the solvers produce. Homogeneous by default.
struct BoundarySpec
{
  DirichletBc u;
  DirichletBc temperature;
  DirichletBc potential;
};

// Space-time scalar field, time-major: values[step * n_nodes + node].
class FieldSolution
{
public:
  FieldSolution() = default;
  FieldSolution(std::string name, std::size_t n_steps, std::size_t n_nodes);

  const std::string &name() const noexcept { return name_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t n_nodes() const noexcept { return n_nodes_; }

  double &at(std::size_t step, std::size_t node) { return values_[step * n_nodes_ + node]; }
  double at(std::size_t step, std::size_t node) const { return values_[step * n_nodes_ + node]; }

  std::span<double> row(std::size_t step) { return {values_.data() + step * n_nodes_, n_nodes_}; }
  std::span<const double> row(std::size_t step) const
  {
    return {values_.data() + step * n_nodes_, n_nodes_};
  }

  const std::vector<double> &values() const noexcept { return values_; }
  std::vector<double> &values() noexcept { return values_; }

  bool all_finite() const;

private:
  std::string name_;
  std::size_t n_steps_ = 0;
  std::size_t n_nodes_ = 0;
  std::vector<double> values_;
};

}  // namespace opbench::fem
