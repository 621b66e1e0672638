// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace opbench::harness
{

// ||s_fe - s_pred||_2 / ||s_fe||_2; std::nullopt marks a degenerate target
// (zero norm). Throws InputError on a length mismatch.
std::optional<double> l2_relative_error(std::span<const double> s_fe, std::span<const double> s_pred);

// Mean absolute difference. Throws InputError on a length mismatch or empty input.
double mae(std::span<const double> s_fe, std::span<const double> s_pred);

// Position in ascending error order of the pth-percentile exemplar out of n:
// min(n - 1, ceil(p n / 100)). p = 0 is the best sample.
std::size_t percentile_rank(double percentile, std::size_t n);

struct PercentileExemplar
{
  double percentile;
  std::size_t rank;    // position in ascending order
  std::size_t sample;  // index into the error vector
  double error;
};

// Ties are broken by index, so the selection is deterministic. Throws
// InputError on empty errors or a percentile outside [0, 100].
std::vector<PercentileExemplar> select_percentiles(std::span<const double> errors,
                                                   std::span<const double> percentiles);

struct Histogram
{
  std::vector<double> edges;  // bins + 1, ascending
  std::vector<std::size_t> counts;
};

// Uniform bins over the observed range; the last bin is closed. A constant
// sample gets a unit-width range centred on its value.
Histogram histogram(std::span<const double> values, std::size_t bins = 30);

}  // namespace opbench::harness
