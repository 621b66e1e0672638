// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "opbench/fem/banded.hpp"
#include "opbench/fem/grid.hpp"

namespace opbench::fem
{

// 4-point Gauss-Legendre rule on the reference element [-1, 1]. Exact for
// polynomials up to degree 7, which covers a quadratic coefficient times two
// quadratic shape functions.
inline constexpr std::size_t kQuadPoints = 4;

struct QuadratureRule
{
  std::array<double, kQuadPoints> points;
  std::array<double, kQuadPoints> weights;
};

const QuadratureRule &gauss_rule();

// Values of a field at every quadrature point, element-major:
// values[e * kQuadPoints + q].
using QuadratureValues = std::vector<double>;

// Physical coordinates of all quadrature points.
QuadratureValues quadrature_coordinates(const Grid1D &grid);
// Interpolates nodal values (quadratic shape functions) to quadrature points.
QuadratureValues to_quadrature(const Grid1D &grid, std::span<const double> nodal);
// d/dx of the interpolated nodal field at quadrature points.
QuadratureValues gradient_at_quadrature(const Grid1D &grid, std::span<const double> nodal);

// A coefficient given either as a constant or as nodal values.
using Coefficient = std::variant<double, std::vector<double>>;

QuadratureValues coefficient_at_quadrature(const Grid1D &grid, const Coefficient &c);

// M_ij = int c phi_i phi_j,  K_ij = int c phi_i' phi_j'
SymmetricBandMatrix assemble_mass(const Grid1D &grid, std::span<const double> qp_coefficient);
SymmetricBandMatrix assemble_stiffness(const Grid1D &grid, std::span<const double> qp_coefficient);
// F_i = int s phi_i
std::vector<double> assemble_load(const Grid1D &grid, std::span<const double> qp_source);

struct FemMatrices
{
  SymmetricBandMatrix mass;
  SymmetricBandMatrix stiffness;
};

FemMatrices assemble_fem_matrices(const Grid1D &grid, const Coefficient &coefficient);

}  // namespace opbench::fem
