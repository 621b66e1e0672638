// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "opbench/field_gen/random_fields.hpp"
#include "opbench/fem/grid.hpp"

namespace opbench::fem
{

enum class Coupling
{
  coupled,
  uncoupled
};

// Frozen (T, phi) trajectories used by the uncoupled mode.
struct ReferenceFields
{
  FieldSolution temperature;
  FieldSolution potential;
};

// Normalized electro-thermal system
//   dT/dt       = (k T')' + Q_ext(t) + Q_e,   Q_e = gamma |phi'|^2
//   d2phi/dt2   = (gamma phi')' + rho_e(t),   gamma = 1 / (1 + beta T)
// with zero initial fields and zero initial potential rate.
struct ThermoElectricalInputs
{
  field_gen::SampledFunction q_ext;  // one value per stored time step
  field_gen::SampledFunction rho_e;  // one value per stored time step
  double k_thermal = 0.116;
  double beta = 3.9;
  Coupling coupling = Coupling::coupled;
  std::optional<ReferenceFields> reference_fields;
};

struct PicardSettings
{
  double tolerance = 1e-8;
  std::size_t max_iterations = 50;
  // 2: Newmark average acceleration on the printed second-order form.
  // 1: backward Euler on M dphi/dt = -K(gamma) phi + F(rho_e).
  int potential_time_order = 2;
};

struct ThermoElectricalSolution
{
  FieldSolution temperature;
  FieldSolution potential;
  // Picard iterations used for each step (index 0 is the initial state, 0).
  std::vector<std::size_t> picard_iterations;
};

// Source s(x, step) for the general driver; `step` indexes the stored time level.
using StepSource = std::function<double(double x, std::size_t step)>;

struct ThermoElectricalProblem
{
  StepSource heat_source;
  StepSource charge_source;
  double k_thermal = 0.116;
  double beta = 3.9;
  Coupling coupling = Coupling::coupled;
  const ReferenceFields *reference_fields = nullptr;
};

// Conductivity 1 / (1 + beta T); throws SolverError at `step` when the
// denominator drops to 1e-6 or below.
double conductivity(double temperature, double beta, std::size_t step);

ThermoElectricalSolution solve_thermo_electrical(const Grid1D &grid, const TimeScheme &scheme,
                                                 const ThermoElectricalInputs &inputs,
                                                 const BoundarySpec &bc = {},
                                                 const PicardSettings &settings = {});

ThermoElectricalSolution solve_thermo_electrical(const Grid1D &grid, const TimeScheme &scheme,
                                                 const ThermoElectricalProblem &problem,
                                                 const BoundarySpec &bc = {},
                                                 const PicardSettings &settings = {});

// Coupled solve of the nominal inputs; its trajectories become the frozen
// references of uncoupled datasets.
ReferenceFields compute_reference_fields(const Grid1D &grid, const TimeScheme &scheme,
                                         const ThermoElectricalInputs &nominal_inputs,
                                         const BoundarySpec &bc = {},
                                         const PicardSettings &settings = {});

}  // namespace opbench::fem
