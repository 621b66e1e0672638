// SPDX-License-Identifier: Apache-2.0

#include "opbench/fem/banded.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "opbench/errors.hpp"

namespace opbench::fem
{

SymmetricBandMatrix::SymmetricBandMatrix(std::size_t n, std::size_t half_bandwidth)
  : n_(n), p_(half_bandwidth), band_(n * (half_bandwidth + 1), 0.0)
{
}

double SymmetricBandMatrix::operator()(std::size_t i, std::size_t j) const
{
  if (i > j)
  {
    std::swap(i, j);
  }
  if (j - i > p_)
  {
    return 0.0;
  }
  return band_[i * (p_ + 1) + (j - i)];
}

void SymmetricBandMatrix::add(std::size_t i, std::size_t j, double v)
{
  if (i > j)
  {
    std::swap(i, j);
  }
  assert(j - i <= p_);
  band_[i * (p_ + 1) + (j - i)] += v;
}

void SymmetricBandMatrix::set(std::size_t i, std::size_t j, double v)
{
  if (i > j)
  {
    std::swap(i, j);
  }
  assert(j - i <= p_);
  band_[i * (p_ + 1) + (j - i)] = v;
}

std::vector<double> SymmetricBandMatrix::multiply(std::span<const double> x) const
{
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
  {
    const double *row = band_.data() + i * (p_ + 1);
    y[i] += row[0] * x[i];
    for (std::size_t k = 1; k <= p_ && i + k < n_; ++k)
    {
      y[i] += row[k] * x[i + k];
      y[i + k] += row[k] * x[i];
    }
  }
  return y;
}

SymmetricBandMatrix SymmetricBandMatrix::plus(const SymmetricBandMatrix &other, double alpha) const
{
  assert(other.n_ == n_ && other.p_ == p_);
  SymmetricBandMatrix out = *this;
  for (std::size_t k = 0; k < band_.size(); ++k)
  {
    out.band_[k] += alpha * other.band_[k];
  }
  return out;
}

SymmetricBandMatrix SymmetricBandMatrix::scaled(double alpha) const
{
  SymmetricBandMatrix out = *this;
  for (auto &v : out.band_)
  {
    v *= alpha;
  }
  return out;
}

BandLdlt::BandLdlt(const SymmetricBandMatrix &a)
  : n_(a.size()), p_(a.half_bandwidth()), lower_(a.size() * (a.half_bandwidth() + 1), 0.0),
    diag_(a.size(), 0.0)
{
  auto l = [&](std::size_t i, std::size_t j) -> double &
  { return lower_[i * (p_ + 1) + (i - j)]; };

  for (std::size_t j = 0; j < n_; ++j)
  {
    const std::size_t k0 = j > p_ ? j - p_ : 0;
    double d = a(j, j);
    for (std::size_t k = k0; k < j; ++k)
    {
      d -= l(j, k) * l(j, k) * diag_[k];
    }
    if (!std::isfinite(d) || std::abs(d) <= 1e-14 * std::max(std::abs(a(j, j)), 1e-300))
    {
      throw SolverError("singular or non-finite pivot in banded LDL^T at row " + std::to_string(j),
                        0);
    }
    diag_[j] = d;
    for (std::size_t i = j + 1; i < n_ && i <= j + p_; ++i)
    {
      const std::size_t m0 = i > p_ ? i - p_ : 0;
      double s = a(i, j);
      for (std::size_t k = m0; k < j; ++k)
      {
        s -= l(i, k) * l(j, k) * diag_[k];
      }
      l(i, j) = s / d;
    }
  }
}

void BandLdlt::solve_in_place(std::span<double> x) const
{
  auto l = [&](std::size_t i, std::size_t j) { return lower_[i * (p_ + 1) + (i - j)]; };
  for (std::size_t i = 0; i < n_; ++i)
  {
    const std::size_t k0 = i > p_ ? i - p_ : 0;
    for (std::size_t k = k0; k < i; ++k)
    {
      x[i] -= l(i, k) * x[k];
    }
  }
  for (std::size_t i = 0; i < n_; ++i)
  {
    x[i] /= diag_[i];
  }
  for (std::size_t ii = n_; ii-- > 0;)
  {
    for (std::size_t k = ii + 1; k < n_ && k <= ii + p_; ++k)
    {
      x[ii] -= l(k, ii) * x[k];
    }
  }
}

std::vector<double> BandLdlt::solve(std::span<const double> b) const
{
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

namespace
{

SymmetricBandMatrix constrain(SymmetricBandMatrix a)
{
  const std::size_t n = a.size();
  const std::size_t p = a.half_bandwidth();
  for (std::size_t b : {std::size_t{0}, n - 1})
  {
    for (std::size_t k = 1; k <= p; ++k)
    {
      if (b + k < n)
      {
        a.set(b, b + k, 0.0);
      }
      if (b >= k)
      {
        a.set(b - k, b, 0.0);
      }
    }
    a.set(b, b, 1.0);
  }
  return a;
}

}  // namespace

DirichletSystem::DirichletSystem(const SymmetricBandMatrix &a)
  : original_(a), factor_(constrain(a))
{
}

std::vector<double> DirichletSystem::solve(std::vector<double> b, double left, double right) const
{
  const std::size_t n = original_.size();
  const std::size_t p = original_.half_bandwidth();
  for (std::size_t k = 1; k <= p && k < n - 1; ++k)
  {
    b[k] -= original_(k, 0) * left;
    b[n - 1 - k] -= original_(n - 1 - k, n - 1) * right;
  }
  b[0] = left;
  b[n - 1] = right;
  factor_.solve_in_place(b);
  b[0] = left;
  b[n - 1] = right;
  return b;
}

}  // namespace opbench::fem
