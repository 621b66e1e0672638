// SPDX-License-Identifier: Apache-2.0

#include "opbench/fem/reaction_diffusion.hpp"

#include <cmath>

#include "opbench/errors.hpp"
#include "opbench/fem/assembly.hpp"
#include "opbench/fem/banded.hpp"

namespace opbench::fem
{

namespace
{

void check_on_nodes(const Grid1D &grid, const field_gen::SampledFunction &f, const char *name)
{
  if (f.size() != grid.n_nodes() || f.coords.size() != grid.n_nodes())
  {
    throw InputError(std::string(name) + " must be sampled at the " +
                     std::to_string(grid.n_nodes()) + " grid nodes");
  }
  for (std::size_t i = 0; i < f.size(); ++i)
  {
    if (std::abs(f.coords[i] - grid.nodes()[i]) > 1e-12)
    {
      throw InputError(std::string(name) + " sensor coordinates do not match grid nodes");
    }
  }
}

struct StepOperator
{
  SymmetricBandMatrix mass;
  DirichletSystem system;
};

StepOperator build_operator(const Grid1D &grid, const TimeScheme &scheme, double diffusivity,
                            std::span<const double> k_nodal)
{
  const auto ones = QuadratureValues(grid.n_elements() * kQuadPoints, 1.0);
  auto mass = assemble_mass(grid, ones);
  const auto stiffness = assemble_stiffness(grid, ones);
  const auto reaction = assemble_mass(grid, to_quadrature(grid, k_nodal));
  const double dt = scheme.dt();
  auto system = mass.plus(stiffness, dt * diffusivity).plus(reaction, dt);
  return {std::move(mass), DirichletSystem(system)};
}

template <typename LoadAt>
FieldSolution march(const Grid1D &grid, const TimeScheme &scheme, const StepOperator &op,
                    const DirichletBc &bc, LoadAt &&load_at)
{
  const std::size_t n = grid.n_nodes();
  const double dt = scheme.dt();
  FieldSolution u("u", scheme.n_steps, n);
  u.at(0, 0) = bc.left;
  u.at(0, n - 1) = bc.right;
  for (std::size_t step = 1; step < scheme.n_steps; ++step)
  {
    auto rhs = op.mass.multiply(u.row(step - 1));
    const auto &load = load_at(step);
    for (std::size_t i = 0; i < n; ++i)
    {
      rhs[i] += dt * load[i];
    }
    const auto next = op.system.solve(std::move(rhs), bc.left, bc.right);
    for (std::size_t i = 0; i < n; ++i)
    {
      if (!std::isfinite(next[i]))
      {
        throw SolverError("non-finite reaction-diffusion state", step);
      }
    }
    std::copy(next.begin(), next.end(), u.row(step).begin());
  }
  return u;
}

}  // namespace

FieldSolution solve_reaction_diffusion(const Grid1D &grid, const TimeScheme &scheme,
                                       const ReactionDiffusionInputs &inputs,
                                       const BoundarySpec &bc)
{
  scheme.validate();
  check_on_nodes(grid, inputs.u0, "u0");
  check_on_nodes(grid, inputs.k, "k");
  const auto op = build_operator(grid, scheme, inputs.diffusivity, inputs.k.values);
  const auto load = assemble_load(grid, to_quadrature(grid, inputs.u0.values));
  return march(grid, scheme, op, bc.u, [&](std::size_t) -> const std::vector<double> & { return load; });
}

FieldSolution solve_reaction_diffusion_forced(const Grid1D &grid, const TimeScheme &scheme,
                                              double diffusivity, std::span<const double> k_nodal,
                                              const SpaceTimeSource &source,
                                              const DirichletBc &bc)
{
  scheme.validate();
  if (k_nodal.size() != grid.n_nodes())
  {
    throw InputError("k must be sampled at the grid nodes");
  }
  const auto op = build_operator(grid, scheme, diffusivity, k_nodal);
  const auto xq = quadrature_coordinates(grid);
  std::vector<double> load;
  QuadratureValues sq(xq.size());
  return march(grid, scheme, op, bc,
               [&](std::size_t step) -> const std::vector<double> &
               {
                 const double t = scheme.time(step);
                 for (std::size_t q = 0; q < xq.size(); ++q)
                 {
                   sq[q] = source(xq[q], t);
                 }
                 load = assemble_load(grid, sq);
                 return load;
               });
}

}  // namespace opbench::fem
