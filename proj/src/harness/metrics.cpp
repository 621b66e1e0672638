// SPDX-License-Identifier: Apache-2.0

#include "opbench/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opbench/errors.hpp"

namespace opbench::harness
{

std::optional<double> l2_relative_error(std::span<const double> s_fe, std::span<const double> s_pred)
{
  if (s_fe.size() != s_pred.size())
  {
    throw InputError("l2_relative_error: length mismatch");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s_fe.size(); ++i)
  {
    const double d = s_fe[i] - s_pred[i];
    num += d * d;
    den += s_fe[i] * s_fe[i];
  }
  if (den == 0.0)
  {
    return std::nullopt;
  }
  return std::sqrt(num) / std::sqrt(den);
}

double mae(std::span<const double> s_fe, std::span<const double> s_pred)
{
  if (s_fe.size() != s_pred.size() || s_fe.empty())
  {
    throw InputError("mae: inputs must have equal nonzero length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < s_fe.size(); ++i)
  {
    sum += std::abs(s_fe[i] - s_pred[i]);
  }
  return sum / static_cast<double>(s_fe.size());
}

std::size_t percentile_rank(double percentile, std::size_t n)
{
  if (n == 0)
  {
    throw InputError("percentile of an empty set");
  }
  if (!(percentile >= 0.0 && percentile <= 100.0))
  {
    throw InputError("percentile must lie in [0, 100]");
  }
  const auto r = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(n) / 100.0));
  return std::min(n - 1, r);
}

std::vector<PercentileExemplar> select_percentiles(std::span<const double> errors,
                                                   std::span<const double> percentiles)
{
  if (errors.empty())
  {
    throw InputError("select_percentiles: no errors");
  }
  std::vector<std::size_t> order(errors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return errors[a] < errors[b]; });
  std::vector<PercentileExemplar> out;
  for (double p : percentiles)
  {
    const std::size_t r = percentile_rank(p, errors.size());
    out.push_back({p, r, order[r], errors[order[r]]});
  }
  return out;
}

Histogram histogram(std::span<const double> values, std::size_t bins)
{
  if (bins == 0)
  {
    throw InputError("histogram needs at least one bin");
  }
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty())
  {
    for (std::size_t i = 0; i <= bins; ++i)
    {
      h.edges.push_back(static_cast<double>(i) / static_cast<double>(bins));
    }
    return h;
  }
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  if (!(hi > lo))
  {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i)
  {
    h.edges.push_back(i == bins ? hi : lo + width * static_cast<double>(i));
  }
  for (double v : values)
  {
    auto b = static_cast<std::size_t>((v - lo) / width);
    b = std::min(b, bins - 1);
    // Keep the assignment consistent with the stored edges.
    while (b > 0 && v < h.edges[b])
    {
      --b;
    }
    while (b + 1 < bins && v >= h.edges[b + 1])
    {
      ++b;
    }
    ++h.counts[b];
  }
  return h;
}

}  // namespace opbench::harness
