// SPDX-License-Identifier: Apache-2.0

#include "opbench/constitutive/kozlowski.hpp"

#include <cmath>
#include <limits>

#include "opbench/errors.hpp"

namespace opbench::constitutive
{

namespace
{

constexpr double kResidualTolerance = 1e-14;
constexpr int kMaxIterations = 400;

}  // namespace

KozlowskiCoefficients coefficients(double temperature, double pct_c)
{
  KozlowskiCoefficients c;
  c.pct_c = pct_c;
  c.f1 = 130.5 - 5.128e-3 * temperature;
  c.f2 = -0.6289 + 1.114e-3 * temperature;
  c.f3 = 8.132 - 1.54e-3 * temperature;
  c.fc = 46550.0 + 71400.0 * pct_c + 12000.0 * pct_c * pct_c;
  return c;
}

bool in_calibrated_range(double temperature) noexcept
{
  return temperature >= kValidTemperatureLow && temperature <= kValidTemperatureHigh;
}

double kozlowski_rhs(const ConstitutiveState &state, const KozlowskiCoefficients &c, double rate)
{
  double hardening = 0.0;
  if (state.inelastic_strain != 0.0)
  {
    hardening = c.f1 * state.inelastic_strain * std::pow(std::abs(rate), c.f2 - 1.0);
  }
  const double base = state.stress - hardening;
  if (!(base > 0.0))
  {
    return 0.0;
  }
  return c.fc * std::pow(base, c.f3) * std::exp(-c.q / state.temperature);
}

double unhardened_rate(const ConstitutiveState &state)
{
  const auto c = coefficients(state.temperature, state.pct_c);
  if (!(state.stress > 0.0))
  {
    return 0.0;
  }
  return c.fc * std::pow(state.stress, c.f3) * std::exp(-c.q / state.temperature);
}

double inelastic_strain_rate(const ConstitutiveState &state)
{
  if (!(state.temperature > 0.0) || !(state.inelastic_strain >= 0.0) ||
      !std::isfinite(state.stress))
  {
    throw ConstitutiveError("invalid constitutive state (need T > 0, eps >= 0, finite stress)");
  }
  if (!(state.stress > 0.0))
  {
    return 0.0;
  }

  const auto c = coefficients(state.temperature, state.pct_c);
  auto g = [&](double r) { return r - kozlowski_rhs(state, c, r); };

  double hi = 10.0 * c.fc * std::pow(std::max(state.stress, 1.0), c.f3) *
              std::exp(-c.q / state.temperature);
  double g_hi = g(hi);
  if (!std::isfinite(g_hi) || !(g_hi > 0.0))
  {
    throw ConstitutiveError("no bracket: g(r_max) is not positive");
  }

  double lo = 0.0;
  double g_lo = g(lo);
  if (g_lo == 0.0)
  {
    // Only reachable for f2 < 1 with eps > 0: look for a positive root by
    // scanning down from r_max geometrically.
    bool found = false;
    double r = hi;
    for (int k = 0; k < 1000 && r > std::numeric_limits<double>::min(); ++k)
    {
      const double next = r * 0.5;
      const double g_next = g(next);
      if (g_next < 0.0)
      {
        lo = next;
        g_lo = g_next;
        hi = r;
        g_hi = g(r);
        found = true;
        break;
      }
      r = next;
    }
    if (!found)
    {
      return 0.0;
    }
  }
  if (!(g_lo < 0.0))
  {
    throw ConstitutiveError("no bracket: g(0) is not negative");
  }

  // Illinois regula falsi with bisection fallback.
  int side = 0;
  double best = g_hi < -g_lo ? hi : lo;
  double best_g = std::min(g_hi, -g_lo);
  for (int it = 0; it < kMaxIterations; ++it)
  {
    double r;
    if (hi > 4.0 * lo)
    {
      // Roots can sit many decades below r_max; shrink the bracket in log space first.
      r = lo > 0.0 ? std::sqrt(lo * hi) : std::max(hi * 0x1p-64, std::numeric_limits<double>::min());
      side = 0;
    }
    else
    {
      r = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
    }
    if (!(r > lo && r < hi))
    {
      r = 0.5 * (lo + hi);
    }
    const double gr = g(r);
    if (std::abs(gr) < best_g)
    {
      best = r;
      best_g = std::abs(gr);
    }
    if (gr == 0.0 || std::abs(gr) <= kResidualTolerance * r)
    {
      return r;
    }
    if (gr < 0.0)
    {
      lo = r;
      g_lo = gr;
      if (side == -1)
      {
        g_hi *= 0.5;
      }
      side = -1;
    }
    else
    {
      hi = r;
      g_hi = gr;
      if (side == 1)
      {
        g_lo *= 0.5;
      }
      side = 1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
    {
      break;
    }
  }
  // Steep kinks near a vanishing overstress can stall the secant steps; finish
  // by bisection down to adjacent doubles.
  while (std::nextafter(lo, hi) < hi)
  {
    const double r = lo + 0.5 * (hi - lo);
    if (!(r > lo && r < hi))
    {
      break;
    }
    const double gr = g(r);
    if (gr == 0.0)
    {
      return r;
    }
    if (std::abs(gr) < best_g)
    {
      best = r;
      best_g = std::abs(gr);
    }
    (gr < 0.0 ? lo : hi) = r;
  }
  if (std::nextafter(lo, hi) >= hi)
  {
    const double g_l = std::abs(g(lo)), g_h = std::abs(g(hi));
    return g_l < g_h ? lo : hi;
  }
  return best;
}

}  // namespace opbench::constitutive
