// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace opbench::fem
{

// Symmetric matrix with half-bandwidth p, stored as the upper band:
// band(i, k) = A(i, i + k) for k in [0, p].
class SymmetricBandMatrix
{
public:
  SymmetricBandMatrix() = default;
  SymmetricBandMatrix(std::size_t n, std::size_t half_bandwidth);

  std::size_t size() const noexcept { return n_; }
  std::size_t half_bandwidth() const noexcept { return p_; }

  // A(i, j); zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;
  // Adds v to A(i, j) (and implicitly A(j, i)). Requires |i - j| <= p.
  void add(std::size_t i, std::size_t j, double v);
  void set(std::size_t i, std::size_t j, double v);

  std::vector<double> multiply(std::span<const double> x) const;
  // this + alpha * other (same shape).
  SymmetricBandMatrix plus(const SymmetricBandMatrix &other, double alpha) const;
  SymmetricBandMatrix scaled(double alpha) const;

private:
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<double> band_;
};

// LDL^T factorization of a symmetric band matrix without pivoting.
class BandLdlt
{
public:
  // Throws SolverError (step 0) when a pivot vanishes or is not finite.
  explicit BandLdlt(const SymmetricBandMatrix &a);

  std::vector<double> solve(std::span<const double> b) const;
  void solve_in_place(std::span<double> x) const;

  std::size_t size() const noexcept { return n_; }

private:
  std::size_t n_;
  std::size_t p_;
  std::vector<double> lower_;  // lower_(i, m) = L(i, i - m), m in [1, p]
  std::vector<double> diag_;
};

// A symmetric system with Dirichlet conditions at the first and last unknowns,
// eliminated symmetrically: the constrained rows and columns are replaced by the
// identity and their couplings moved to the right-hand side.
class DirichletSystem
{
public:
  explicit DirichletSystem(const SymmetricBandMatrix &a);

  // Solves A x = b with x[0] = left, x[n-1] = right.
  std::vector<double> solve(std::vector<double> b, double left, double right) const;

private:
  SymmetricBandMatrix original_;
  BandLdlt factor_;
};

}  // namespace opbench::fem
