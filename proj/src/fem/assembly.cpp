// SPDX-License-Identifier: Apache-2.0

#include "opbench/fem/assembly.hpp"

#include <cmath>

#include "opbench/errors.hpp"

namespace opbench::fem
{

namespace
{

struct ShapeTable
{
  std::array<std::array<double, 3>, kQuadPoints> value;
  std::array<std::array<double, 3>, kQuadPoints> deriv;  // d/dxi
};

const ShapeTable &shape_table()
{
  static const ShapeTable table = []
  {
    ShapeTable t{};
    const auto &rule = gauss_rule();
    for (std::size_t q = 0; q < kQuadPoints; ++q)
    {
      const double xi = rule.points[q];
      t.value[q] = {0.5 * xi * (xi - 1.0), 1.0 - xi * xi, 0.5 * xi * (xi + 1.0)};
      t.deriv[q] = {xi - 0.5, -2.0 * xi, xi + 0.5};
    }
    return t;
  }();
  return table;
}

void check_qp_size(const Grid1D &grid, std::size_t size)
{
  if (size != grid.n_elements() * kQuadPoints)
  {
    throw InputError("quadrature array has wrong length");
  }
}

}  // namespace

const QuadratureRule &gauss_rule()
{
  static const QuadratureRule rule = []
  {
    const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
    const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
    return QuadratureRule{{-b, -a, a, b}, {wb, wa, wa, wb}};
  }();
  return rule;
}

QuadratureValues quadrature_coordinates(const Grid1D &grid)
{
  const auto &rule = gauss_rule();
  const double h = grid.element_size();
  QuadratureValues x(grid.n_elements() * kQuadPoints);
  for (std::size_t e = 0; e < grid.n_elements(); ++e)
  {
    const double center = (static_cast<double>(e) + 0.5) * h;
    for (std::size_t q = 0; q < kQuadPoints; ++q)
    {
      x[e * kQuadPoints + q] = center + 0.5 * h * rule.points[q];
    }
  }
  return x;
}

QuadratureValues to_quadrature(const Grid1D &grid, std::span<const double> nodal)
{
  if (nodal.size() != grid.n_nodes())
  {
    throw InputError("nodal array has wrong length");
  }
  const auto &shape = shape_table();
  QuadratureValues out(grid.n_elements() * kQuadPoints);
  for (std::size_t e = 0; e < grid.n_elements(); ++e)
  {
    const double *u = nodal.data() + 2 * e;
    for (std::size_t q = 0; q < kQuadPoints; ++q)
    {
      const auto &n = shape.value[q];
      out[e * kQuadPoints + q] = n[0] * u[0] + n[1] * u[1] + n[2] * u[2];
    }
  }
  return out;
}

QuadratureValues gradient_at_quadrature(const Grid1D &grid, std::span<const double> nodal)
{
  if (nodal.size() != grid.n_nodes())
  {
    throw InputError("nodal array has wrong length");
  }
  const auto &shape = shape_table();
  const double inv_jac = 2.0 / grid.element_size();
  QuadratureValues out(grid.n_elements() * kQuadPoints);
  for (std::size_t e = 0; e < grid.n_elements(); ++e)
  {
    const double *u = nodal.data() + 2 * e;
    for (std::size_t q = 0; q < kQuadPoints; ++q)
    {
      const auto &d = shape.deriv[q];
      out[e * kQuadPoints + q] = inv_jac * (d[0] * u[0] + d[1] * u[1] + d[2] * u[2]);
    }
  }
  return out;
}

QuadratureValues coefficient_at_quadrature(const Grid1D &grid, const Coefficient &c)
{
  if (const auto *constant = std::get_if<double>(&c))
  {
    return QuadratureValues(grid.n_elements() * kQuadPoints, *constant);
  }
  return to_quadrature(grid, std::get<std::vector<double>>(c));
}

SymmetricBandMatrix assemble_mass(const Grid1D &grid, std::span<const double> qp_coefficient)
{
  check_qp_size(grid, qp_coefficient.size());
  const auto &rule = gauss_rule();
  const auto &shape = shape_table();
  const double jac = 0.5 * grid.element_size();
  SymmetricBandMatrix m(grid.n_nodes(), 2);
  for (std::size_t e = 0; e < grid.n_elements(); ++e)
  {
    std::array<std::array<double, 3>, 3> local{};
    for (std::size_t q = 0; q < kQuadPoints; ++q)
    {
      const double w = rule.weights[q] * jac * qp_coefficient[e * kQuadPoints + q];
      const auto &n = shape.value[q];
      for (std::size_t a = 0; a < 3; ++a)
      {
        for (std::size_t b = a; b < 3; ++b)
        {
          local[a][b] += w * n[a] * n[b];
        }
      }
    }
    for (std::size_t a = 0; a < 3; ++a)
    {
      for (std::size_t b = a; b < 3; ++b)
      {
        m.add(2 * e + a, 2 * e + b, local[a][b]);
      }
    }
  }
  return m;
}

SymmetricBandMatrix assemble_stiffness(const Grid1D &grid, std::span<const double> qp_coefficient)
{
  check_qp_size(grid, qp_coefficient.size());
  const auto &rule = gauss_rule();
  const auto &shape = shape_table();
  const double jac = 0.5 * grid.element_size();
  const double inv_jac = 1.0 / jac;
  SymmetricBandMatrix k(grid.n_nodes(), 2);
  for (std::size_t e = 0; e < grid.n_elements(); ++e)
  {
    std::array<std::array<double, 3>, 3> local{};
    for (std::size_t q = 0; q < kQuadPoints; ++q)
    {
      const double w = rule.weights[q] * inv_jac * qp_coefficient[e * kQuadPoints + q];
      const auto &d = shape.deriv[q];
      for (std::size_t a = 0; a < 3; ++a)
      {
        for (std::size_t b = a; b < 3; ++b)
        {
          local[a][b] += w * d[a] * d[b];
        }
      }
    }
    for (std::size_t a = 0; a < 3; ++a)
    {
      for (std::size_t b = a; b < 3; ++b)
      {
        k.add(2 * e + a, 2 * e + b, local[a][b]);
      }
    }
  }
  return k;
}

std::vector<double> assemble_load(const Grid1D &grid, std::span<const double> qp_source)
{
  check_qp_size(grid, qp_source.size());
  const auto &rule = gauss_rule();
  const auto &shape = shape_table();
  const double jac = 0.5 * grid.element_size();
  std::vector<double> f(grid.n_nodes(), 0.0);
  for (std::size_t e = 0; e < grid.n_elements(); ++e)
  {
    for (std::size_t q = 0; q < kQuadPoints; ++q)
    {
      const double w = rule.weights[q] * jac * qp_source[e * kQuadPoints + q];
      const auto &n = shape.value[q];
      for (std::size_t a = 0; a < 3; ++a)
      {
        f[2 * e + a] += w * n[a];
      }
    }
  }
  return f;
}

FemMatrices assemble_fem_matrices(const Grid1D &grid, const Coefficient &coefficient)
{
  const auto qp = coefficient_at_quadrature(grid, coefficient);
  return {assemble_mass(grid, qp), assemble_stiffness(grid, qp)};
}

}  // namespace opbench::fem
