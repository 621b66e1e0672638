// SPDX-License-Identifier: Apache-2.0

#include "opbench/fem/grid.hpp"

#include <algorithm>
#include <cmath>

#include "opbench/errors.hpp"

namespace opbench::fem
{

Grid1D::Grid1D(std::size_t n_elements) : n_elements_(n_elements)
{
  if (n_elements == 0)
  {
    throw InputError("Grid1D needs at least one element");
  }
  const std::size_t n = n_nodes();
  nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    nodes_[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  nodes_.back() = 1.0;
}

double TimeScheme::time(std::size_t step) const noexcept
{
  if (step + 1 == n_steps)
  {
    return t_end;
  }
  return t_end * static_cast<double>(step) / static_cast<double>(n_steps - 1);
}

std::vector<double> TimeScheme::times() const
{
  std::vector<double> t(n_steps);
  for (std::size_t s = 0; s < n_steps; ++s)
  {
    t[s] = time(s);
  }
  return t;
}

void TimeScheme::validate() const
{
  if (n_steps < 2 || !(t_end > 0.0))
  {
    throw InputError("TimeScheme needs n_steps >= 2 and t_end > 0");
  }
}

FieldSolution::FieldSolution(std::string name, std::size_t n_steps, std::size_t n_nodes)
  : name_(std::move(name)), n_steps_(n_steps), n_nodes_(n_nodes), values_(n_steps * n_nodes, 0.0)
{
}

bool FieldSolution::all_finite() const
{
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace opbench::fem
