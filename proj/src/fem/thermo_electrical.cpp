// SPDX-License-Identifier: Apache-2.0

#include "opbench/fem/thermo_electrical.hpp"

#include <algorithm>
#include <cmath>

#include "opbench/errors.hpp"
#include "opbench/fem/assembly.hpp"
#include "opbench/fem/banded.hpp"

namespace opbench::fem
{

namespace
{

constexpr double kNewmarkBeta = 0.25;
constexpr double kNewmarkGamma = 0.5;
constexpr double kMinDenominator = 1e-6;

double max_abs(std::span<const double> v)
{
  double m = 0.0;
  for (double x : v)
  {
    m = std::max(m, std::abs(x));
  }
  return m;
}

double relative_change(std::span<const double> next, std::span<const double> prev)
{
  double diff = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i)
  {
    diff = std::max(diff, std::abs(next[i] - prev[i]));
  }
  if (diff == 0.0)
  {
    return 0.0;
  }
  return diff / std::max(max_abs(next), 1e-300);
}

void check_finite(std::span<const double> v, const char *what, std::size_t step)
{
  for (double x : v)
  {
    if (!std::isfinite(x))
    {
      throw SolverError(std::string("non-finite ") + what, step);
    }
  }
}

// State of the potential equation at one time level.
struct PotentialState
{
  std::vector<double> value;
  std::vector<double> rate;
  std::vector<double> accel;
};

class Stepper
{
public:
  Stepper(const Grid1D &grid, const TimeScheme &scheme, const ThermoElectricalProblem &problem,
          const BoundarySpec &bc, const PicardSettings &settings)
    : grid_(grid), scheme_(scheme), problem_(problem), bc_(bc), settings_(settings),
      ones_(grid.n_elements() * kQuadPoints, 1.0), xq_(quadrature_coordinates(grid)),
      mass_(assemble_mass(grid, ones_)),
      heat_system_(mass_.plus(assemble_stiffness(grid, ones_), scheme.dt() * problem.k_thermal)),
      mass_system_(mass_)
  {
  }

  ThermoElectricalSolution run()
  {
    const std::size_t n = grid_.n_nodes();
    const std::size_t steps = scheme_.n_steps;
    ThermoElectricalSolution out{FieldSolution("T", steps, n), FieldSolution("phi", steps, n),
                                 std::vector<std::size_t>(steps, 0)};
    std::vector<double> temperature(n, 0.0);
    temperature.front() = bc_.temperature.left;
    temperature.back() = bc_.temperature.right;
    PotentialState phi{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                       std::vector<double>(n, 0.0)};
    phi.value.front() = bc_.potential.left;
    phi.value.back() = bc_.potential.right;

    if (settings_.potential_time_order == 2)
    {
      // M a0 = F(rho_e(0)) - K(gamma(T0)) phi0
      const auto stiffness = assemble_stiffness(grid_, gamma_at(temperature_for_potential(0, temperature), 0));
      auto rhs = charge_load(0);
      const auto k_phi = stiffness.multiply(phi.value);
      for (std::size_t i = 0; i < n; ++i)
      {
        rhs[i] -= k_phi[i];
      }
      phi.accel = mass_system_.solve(std::move(rhs), 0.0, 0.0);
    }

    std::copy(temperature.begin(), temperature.end(), out.temperature.row(0).begin());
    std::copy(phi.value.begin(), phi.value.end(), out.potential.row(0).begin());

    for (std::size_t step = 1; step < steps; ++step)
    {
      if (problem_.coupling == Coupling::coupled)
      {
        out.picard_iterations[step] = coupled_step(step, temperature, phi);
      }
      else
      {
        uncoupled_step(step, temperature, phi);
        out.picard_iterations[step] = 1;
      }
      std::copy(temperature.begin(), temperature.end(), out.temperature.row(step).begin());
      std::copy(phi.value.begin(), phi.value.end(), out.potential.row(step).begin());
    }
    return out;
  }

private:
  std::vector<double> charge_load(std::size_t step) const
  {
    QuadratureValues s(xq_.size());
    for (std::size_t q = 0; q < xq_.size(); ++q)
    {
      s[q] = problem_.charge_source(xq_[q], step);
    }
    return assemble_load(grid_, s);
  }

  std::vector<double> heat_load(std::size_t step) const
  {
    QuadratureValues s(xq_.size());
    for (std::size_t q = 0; q < xq_.size(); ++q)
    {
      s[q] = problem_.heat_source(xq_[q], step);
    }
    return assemble_load(grid_, s);
  }

  QuadratureValues gamma_at(std::span<const double> temperature_nodal, std::size_t step) const
  {
    auto g = to_quadrature(grid_, temperature_nodal);
    for (auto &v : g)
    {
      v = conductivity(v, problem_.beta, step);
    }
    return g;
  }

  std::span<const double> temperature_for_potential(std::size_t step,
                                                    std::span<const double> current) const
  {
    if (problem_.coupling == Coupling::uncoupled)
    {
      return problem_.reference_fields->temperature.row(step);
    }
    return current;
  }

  // Advances phi from `prev` to level `step` with conductivity gamma_q.
  PotentialState advance_potential(std::size_t step, const PotentialState &prev,
                                   std::span<const double> gamma_q) const
  {
    const std::size_t n = grid_.n_nodes();
    const double dt = scheme_.dt();
    const auto stiffness = assemble_stiffness(grid_, gamma_q);
    auto load = charge_load(step);
    PotentialState next = prev;

    if (settings_.potential_time_order == 2)
    {
      std::vector<double> predictor(n);
      for (std::size_t i = 0; i < n; ++i)
      {
        predictor[i] = prev.value[i] + dt * prev.rate[i] +
                       dt * dt * (0.5 - kNewmarkBeta) * prev.accel[i];
      }
      const auto k_pred = stiffness.multiply(predictor);
      for (std::size_t i = 0; i < n; ++i)
      {
        load[i] -= k_pred[i];
      }
      const DirichletSystem system(mass_.plus(stiffness, kNewmarkBeta * dt * dt));
      next.accel = system.solve(std::move(load), 0.0, 0.0);
      for (std::size_t i = 0; i < n; ++i)
      {
        next.value[i] = predictor[i] + kNewmarkBeta * dt * dt * next.accel[i];
        next.rate[i] = prev.rate[i] +
                       dt * ((1.0 - kNewmarkGamma) * prev.accel[i] + kNewmarkGamma * next.accel[i]);
      }
      next.value.front() = bc_.potential.left;
      next.value.back() = bc_.potential.right;
    }
    else
    {
      auto rhs = mass_.multiply(prev.value);
      for (std::size_t i = 0; i < n; ++i)
      {
        rhs[i] += dt * load[i];
      }
      const DirichletSystem system(mass_.plus(stiffness, dt));
      next.value = system.solve(std::move(rhs), bc_.potential.left, bc_.potential.right);
    }
    check_finite(next.value, "potential", step);
    return next;
  }

  // Backward Euler heat step with Joule source gamma |phi'|^2 at quadrature points.
  std::vector<double> advance_temperature(std::size_t step, std::span<const double> prev,
                                          std::span<const double> gamma_q,
                                          std::span<const double> phi_nodal) const
  {
    const std::size_t n = grid_.n_nodes();
    const double dt = scheme_.dt();
    auto joule = gradient_at_quadrature(grid_, phi_nodal);
    for (std::size_t q = 0; q < joule.size(); ++q)
    {
      joule[q] = gamma_q[q] * joule[q] * joule[q];
    }
    const auto joule_load = assemble_load(grid_, joule);
    const auto ext_load = heat_load(step);
    auto rhs = mass_.multiply(prev);
    for (std::size_t i = 0; i < n; ++i)
    {
      rhs[i] += dt * (ext_load[i] + joule_load[i]);
    }
    auto next = heat_system_.solve(std::move(rhs), bc_.temperature.left, bc_.temperature.right);
    check_finite(next, "temperature", step);
    return next;
  }

  std::size_t coupled_step(std::size_t step, std::vector<double> &temperature,
                           PotentialState &phi) const
  {
    std::vector<double> t_iter = temperature;
    PotentialState phi_iter = phi;
    for (std::size_t it = 1; it <= settings_.max_iterations; ++it)
    {
      const auto gamma_q = gamma_at(t_iter, step);
      auto phi_next = advance_potential(step, phi, gamma_q);
      auto t_next = advance_temperature(step, temperature, gamma_q, phi_next.value);
      const double change = std::max(relative_change(phi_next.value, phi_iter.value),
                                     relative_change(t_next, t_iter));
      phi_iter = std::move(phi_next);
      t_iter = std::move(t_next);
      if (change < settings_.tolerance)
      {
        temperature = std::move(t_iter);
        phi = std::move(phi_iter);
        return it;
      }
    }
    throw SolverError("Picard iteration did not converge", step);
  }

  void uncoupled_step(std::size_t step, std::vector<double> &temperature, PotentialState &phi) const
  {
    const auto &refs = *problem_.reference_fields;
    const auto gamma_q = gamma_at(refs.temperature.row(step), step);
    phi = advance_potential(step, phi, gamma_q);
    temperature = advance_temperature(step, temperature, gamma_q, refs.potential.row(step));
  }

  const Grid1D &grid_;
  const TimeScheme &scheme_;
  const ThermoElectricalProblem &problem_;
  const BoundarySpec &bc_;
  const PicardSettings &settings_;
  QuadratureValues ones_;
  QuadratureValues xq_;
  SymmetricBandMatrix mass_;
  DirichletSystem heat_system_;
  DirichletSystem mass_system_;
};

void check_time_series(const field_gen::SampledFunction &f, const TimeScheme &scheme,
                       const char *name)
{
  if (f.size() != scheme.n_steps)
  {
    throw InputError(std::string(name) + " must have exactly " + std::to_string(scheme.n_steps) +
                     " values");
  }
}

void check_reference(const FieldSolution &f, const Grid1D &grid, const TimeScheme &scheme)
{
  if (f.n_steps() != scheme.n_steps || f.n_nodes() != grid.n_nodes())
  {
    throw InputError("reference field has the wrong shape");
  }
}

}  // namespace

double conductivity(double temperature, double beta, std::size_t step)
{
  const double denom = 1.0 + beta * temperature;
  if (!(denom > kMinDenominator))
  {
    throw SolverError("conductivity blow-up: 1 + beta T <= 1e-6", step);
  }
  return 1.0 / denom;
}

ThermoElectricalSolution solve_thermo_electrical(const Grid1D &grid, const TimeScheme &scheme,
                                                 const ThermoElectricalProblem &problem,
                                                 const BoundarySpec &bc,
                                                 const PicardSettings &settings)
{
  scheme.validate();
  if (!(problem.beta > 0.0))
  {
    throw InputError("beta must be > 0");
  }
  if (settings.potential_time_order != 1 && settings.potential_time_order != 2)
  {
    throw InputError("potential_time_order must be 1 or 2");
  }
  if (problem.coupling == Coupling::uncoupled)
  {
    if (problem.reference_fields == nullptr)
    {
      throw InputError("uncoupled mode requires reference fields");
    }
    check_reference(problem.reference_fields->temperature, grid, scheme);
    check_reference(problem.reference_fields->potential, grid, scheme);
  }
  Stepper stepper(grid, scheme, problem, bc, settings);
  return stepper.run();
}

ThermoElectricalSolution solve_thermo_electrical(const Grid1D &grid, const TimeScheme &scheme,
                                                 const ThermoElectricalInputs &inputs,
                                                 const BoundarySpec &bc,
                                                 const PicardSettings &settings)
{
  check_time_series(inputs.q_ext, scheme, "q_ext");
  check_time_series(inputs.rho_e, scheme, "rho_e");
  if (inputs.coupling == Coupling::uncoupled && !inputs.reference_fields)
  {
    throw InputError("uncoupled mode requires reference fields");
  }
  const auto &q = inputs.q_ext.values;
  const auto &rho = inputs.rho_e.values;
  ThermoElectricalProblem problem{[&q](double, std::size_t step) { return q[step]; },
                                  [&rho](double, std::size_t step) { return rho[step]; },
                                  inputs.k_thermal,
                                  inputs.beta,
                                  inputs.coupling,
                                  inputs.reference_fields ? &*inputs.reference_fields : nullptr};
  return solve_thermo_electrical(grid, scheme, problem, bc, settings);
}

ReferenceFields compute_reference_fields(const Grid1D &grid, const TimeScheme &scheme,
                                         const ThermoElectricalInputs &nominal_inputs,
                                         const BoundarySpec &bc, const PicardSettings &settings)
{
  ThermoElectricalInputs coupled = nominal_inputs;
  coupled.coupling = Coupling::coupled;
  coupled.reference_fields.reset();
  auto solution = solve_thermo_electrical(grid, scheme, coupled, bc, settings);
  return {std::move(solution.temperature), std::move(solution.potential)};
}

}  // namespace opbench::fem
