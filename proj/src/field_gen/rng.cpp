// SPDX-License-Identifier: Apache-2.0

#include "opbench/field_gen/rng.hpp"

#include <cmath>
#include <numbers>

namespace opbench::field_gen
{

std::uint64_t CounterRng::below(std::uint64_t n) noexcept
{
  if (n <= 1)
  {
    return 0;
  }
  const std::uint64_t threshold = (0 - n) % n;
  while (true)
  {
    const unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    if (static_cast<std::uint64_t>(m) >= threshold)
    {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

double CounterRng::normal() noexcept
{
  if (has_spare_)
  {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace opbench::field_gen
