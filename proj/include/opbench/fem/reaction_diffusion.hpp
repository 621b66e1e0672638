// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "opbench/field_gen/random_fields.hpp"
#include "opbench/fem/grid.hpp"

namespace opbench::fem
{

// du/dt = D u'' + u0(x) - k(x) u, u(x, 0) = 0.
struct ReactionDiffusionInputs
{
  field_gen::SampledFunction u0;
  field_gen::SampledFunction k;
  double diffusivity = 0.01;
};

// Time-dependent source s(x, t), evaluated at quadrature points.
using SpaceTimeSource = std::function<double(double x, double t)>;

// Backward Euler on the Galerkin form:
//   (M + dt (D K + R_k)) u^{n+1} = M u^n + dt F(u0).
// Throws InputError when u0 or k are not sampled at the grid nodes and
// SolverError when the system matrix cannot be factored.
FieldSolution solve_reaction_diffusion(const Grid1D &grid, const TimeScheme &scheme,
                                       const ReactionDiffusionInputs &inputs,
                                       const BoundarySpec &bc = {});

// Same discretization with an arbitrary space-time source and nodal reaction
// coefficient, used for manufactured-solution studies.
FieldSolution solve_reaction_diffusion_forced(const Grid1D &grid, const TimeScheme &scheme,
                                              double diffusivity, std::span<const double> k_nodal,
                                              const SpaceTimeSource &source,
                                              const DirichletBc &bc = {});

}  // namespace opbench::fem
