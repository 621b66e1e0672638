// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace opbench::field_gen
{

// A scalar function of one variable recorded at fixed, strictly increasing
// sensor coordinates.
struct SampledFunction
{
  std::vector<double> coords;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool operator==(const SampledFunction &) const = default;
};

// Stationary 1D Gaussian random field with squared-exponential covariance
//   C(r) = variance * exp(-r^2 / (2 l^2)),  l = correlation_length * domain_length.
struct GrfSpec
{
  std::size_t n_points = 255;
  double domain_length = 1.0;
  double mean = 0.0;
  double variance = 1.0;
  double correlation_length = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const GrfSpec &) const = default;
};

enum class Trend
{
  none,
  increasing,
  decreasing
};

// Smooth profile through randomly placed knots, interpolated with Gaussian
// radial basis functions exp(-(r / (rbf_width * domain_length))^2).
struct RbfProfileSpec
{
  std::size_t n_knots = 8;
  double knot_low = 0.0;
  double knot_high = 1.0;
  Trend trend = Trend::none;
  std::size_t n_points = 101;
  double domain_length = 1.0;
  double rbf_width = 0.25;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const RbfProfileSpec &) const = default;
};

using InputSpec = std::variant<GrfSpec, RbfProfileSpec>;

// n equispaced points on [0, length], both endpoints included.
std::vector<double> equispaced(std::size_t n, double length);

SampledFunction generate_grf(const GrfSpec &spec);

// The interpolant behind generate_rbf_profile, exposed so callers can inspect
// the knots and evaluate between output points.
class RbfInterpolant
{
public:
  explicit RbfInterpolant(const RbfProfileSpec &spec);

  double operator()(double t) const;

  const std::vector<double> &knot_times() const noexcept { return knot_times_; }
  const std::vector<double> &knot_values() const noexcept { return knot_values_; }
  const std::vector<double> &weights() const noexcept { return weights_; }

private:
  double width_;
  std::vector<double> knot_times_;
  std::vector<double> knot_values_;
  std::vector<double> weights_;
};

SampledFunction generate_rbf_profile(const RbfProfileSpec &spec);

SampledFunction generate(const InputSpec &spec);

// Element i equals generate(specs[i]) bitwise regardless of `threads`.
// A failing element is reported as GenerationError carrying its index.
std::vector<SampledFunction> batch_generate(std::span<const InputSpec> specs,
                                            std::size_t threads = 1);

}  // namespace opbench::field_gen
