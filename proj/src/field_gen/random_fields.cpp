// SPDX-License-Identifier: Apache-2.0

#include "opbench/field_gen/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "opbench/errors.hpp"
#include "opbench/field_gen/rng.hpp"
#include "opbench/parallel.hpp"

namespace opbench::field_gen
{

namespace
{

constexpr double kBaseJitter = 1e-10;
constexpr int kMaxJitterDoublings = 8;
constexpr double kKnotTolerance = 1e-8;

using CovarianceKey = std::tuple<std::size_t, double, double, double>;

// Cholesky factors are reused across seeds; factorization dominates the cost of
// a single draw at the default resolution.
std::shared_ptr<const Eigen::MatrixXd> cholesky_factor(const GrfSpec &spec)
{
  static std::mutex mutex;
  static std::map<CovarianceKey, std::shared_ptr<const Eigen::MatrixXd>> cache;

  const CovarianceKey key{spec.n_points, spec.domain_length, spec.variance,
                          spec.correlation_length};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end())
    {
      return it->second;
    }
  }

  const auto x = equispaced(spec.n_points, spec.domain_length);
  const double ell = spec.correlation_length * spec.domain_length;
  const auto n = static_cast<Eigen::Index>(spec.n_points);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    for (Eigen::Index j = 0; j < n; ++j)
    {
      const double r = x[i] - x[j];
      cov(i, j) = spec.variance * std::exp(-r * r / (2.0 * ell * ell));
    }
  }

  double jitter = kBaseJitter * spec.variance;
  for (int attempt = 0; attempt <= kMaxJitterDoublings; ++attempt, jitter *= 2.0)
  {
    Eigen::MatrixXd a = cov;
    a.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success)
    {
      auto factor = std::make_shared<const Eigen::MatrixXd>(llt.matrixL());
      std::lock_guard lock(mutex);
      return cache.emplace(key, std::move(factor)).first->second;
    }
  }
  throw GenerationError("covariance matrix not positive definite after maximum jitter");
}

}  // namespace

void GrfSpec::validate() const
{
  if (n_points < 2)
  {
    throw GenerationError("GrfSpec.n_points must be >= 2");
  }
  if (!(domain_length > 0.0))
  {
    throw GenerationError("GrfSpec.domain_length must be > 0");
  }
  if (!(correlation_length > 0.0))
  {
    throw GenerationError("GrfSpec.correlation_length must be > 0");
  }
  if (!(variance >= 0.0) || !std::isfinite(mean))
  {
    throw GenerationError("GrfSpec.variance must be >= 0 and mean finite");
  }
}

void RbfProfileSpec::validate() const
{
  if (n_knots < 2)
  {
    throw GenerationError("RbfProfileSpec.n_knots must be >= 2");
  }
  if (n_points < 2)
  {
    throw GenerationError("RbfProfileSpec.n_points must be >= 2");
  }
  if (!(knot_low <= knot_high))
  {
    throw GenerationError("RbfProfileSpec.knot_value_range must satisfy low <= high");
  }
  if (!(domain_length > 0.0) || !(rbf_width > 0.0))
  {
    throw GenerationError("RbfProfileSpec.domain_length and rbf_width must be > 0");
  }
}

std::vector<double> equispaced(std::size_t n, double length)
{
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    x[i] = length * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  x.back() = length;
  return x;
}

SampledFunction generate_grf(const GrfSpec &spec)
{
  spec.validate();
  SampledFunction out;
  out.coords = equispaced(spec.n_points, spec.domain_length);
  out.values.assign(spec.n_points, spec.mean);
  if (spec.variance == 0.0)
  {
    return out;
  }

  const auto factor = cholesky_factor(spec);
  CounterRng rng(spec.seed);
  Eigen::VectorXd z(static_cast<Eigen::Index>(spec.n_points));
  for (Eigen::Index i = 0; i < z.size(); ++i)
  {
    z[i] = rng.normal();
  }
  const Eigen::VectorXd field = factor->triangularView<Eigen::Lower>() * z;
  for (std::size_t i = 0; i < spec.n_points; ++i)
  {
    out.values[i] += field[static_cast<Eigen::Index>(i)];
  }
  return out;
}

RbfInterpolant::RbfInterpolant(const RbfProfileSpec &spec)
  : width_(spec.rbf_width * spec.domain_length)
{
  spec.validate();
  CounterRng rng(spec.seed);
  const std::size_t n = spec.n_knots;

  // Jittered stratified knot times: one knot per stratum, kept away from the
  // stratum edges so the kernel matrix stays well conditioned.
  knot_times_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    const double u = rng.uniform(0.25, 0.75);
    knot_times_[i] = spec.domain_length * (static_cast<double>(i) + u) / static_cast<double>(n);
  }
  knot_values_.resize(n);
  for (auto &v : knot_values_)
  {
    v = rng.uniform(spec.knot_low, spec.knot_high);
  }
  if (spec.trend == Trend::increasing)
  {
    std::sort(knot_values_.begin(), knot_values_.end());
  }
  else if (spec.trend == Trend::decreasing)
  {
    std::sort(knot_values_.begin(), knot_values_.end(), std::greater<>());
  }

  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd kernel(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i)
  {
    rhs[i] = knot_values_[i];
    for (Eigen::Index j = 0; j < m; ++j)
    {
      const double r = (knot_times_[i] - knot_times_[j]) / width_;
      kernel(i, j) = std::exp(-r * r);
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(kernel);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
  {
    throw GenerationError("singular RBF interpolation system");
  }
  const Eigen::VectorXd w = ldlt.solve(rhs);
  weights_.assign(w.data(), w.data() + w.size());

  double scale = 0.0;
  for (double v : knot_values_)
  {
    scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    const double err = std::abs((*this)(knot_times_[i]) - knot_values_[i]);
    if (!std::isfinite(err) || err > kKnotTolerance * std::max(scale, 1e-300))
    {
      if (scale == 0.0 && err == 0.0)
      {
        continue;
      }
      throw GenerationError("RBF interpolation system too ill-conditioned to reproduce knots");
    }
  }
}

double RbfInterpolant::operator()(double t) const
{
  double s = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j)
  {
    const double r = (t - knot_times_[j]) / width_;
    s += weights_[j] * std::exp(-r * r);
  }
  return s;
}

SampledFunction generate_rbf_profile(const RbfProfileSpec &spec)
{
  const RbfInterpolant interpolant(spec);
  SampledFunction out;
  out.coords = equispaced(spec.n_points, spec.domain_length);
  out.values.resize(spec.n_points);
  std::transform(out.coords.begin(), out.coords.end(), out.values.begin(),
                 [&](double t) { return interpolant(t); });
  return out;
}

SampledFunction generate(const InputSpec &spec)
{
  return std::visit(
      [](const auto &s)
      {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GrfSpec>)
        {
          return generate_grf(s);
        }
        else
        {
          return generate_rbf_profile(s);
        }
      },
      spec);
}

std::vector<SampledFunction> batch_generate(std::span<const InputSpec> specs, std::size_t threads)
{
  std::vector<SampledFunction> out(specs.size());
  parallel_for(specs.size(), threads,
               [&](std::size_t i)
               {
                 try
                 {
                   out[i] = generate(specs[i]);
                 }
                 catch (const GenerationError &e)
                 {
                   throw GenerationError("batch element " + std::to_string(i) + ": " + e.what(), i);
                 }
               });
  return out;
}

}  // namespace opbench::field_gen
