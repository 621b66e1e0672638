// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace opbench::constitutive
{

// Activation constant Q (K) of the austenite law.
inline constexpr double kActivation = 44465.0;
inline constexpr double kValidTemperatureLow = 1273.0;   // K
inline constexpr double kValidTemperatureHigh = 1773.0;  // K

struct KozlowskiCoefficients
{
  double q = kActivation;
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  double fc = 0.0;
  double pct_c = 0.0;
};

// Temperature in kelvin, carbon content in weight percent.
KozlowskiCoefficients coefficients(double temperature, double pct_c);

bool in_calibrated_range(double temperature) noexcept;

struct ConstitutiveState
{
  double stress = 0.0;           // effective (von Mises) stress, MPa
  double inelastic_strain = 0.0;  // accumulated, >= 0
  double temperature = 0.0;       // K, > 0
  double pct_c = 0.0;
};

// Right-hand side of the implicit Kozlowski law for a trial rate r:
//   fc * max(sigma - f1 * eps * |r|^(f2 - 1), 0)^f3 * exp(-Q / T).
double kozlowski_rhs(const ConstitutiveState &state, const KozlowskiCoefficients &c, double rate);

// Unhardened rate fc * sigma^f3 * exp(-Q / T), the closed form when eps = 0.
double unhardened_rate(const ConstitutiveState &state);

/**
 * Inelastic strain rate (1/s) solving r = kozlowski_rhs(r).
 *
 * Bracketed on [0, r_max] with r_max = 10 fc max(sigma, 1)^f3 exp(-Q/T). The
 * bracket is narrowed geometrically while hi > 4 lo, then by Illinois regula
 * falsi until |g(r)| <= 1e-14 r, and finally by bisection down to adjacent
 * doubles if the secant steps stall. Negative overstress gives zero rate.
 *
 * For f2 < 1 (below about 1462 K) r = 0 is always a root once eps > 0; the
 * solver returns the largest positive root it can bracket and 0 otherwise.
 *
 * Throws ConstitutiveError for invalid states or when no bracket exists.
 */
double inelastic_strain_rate(const ConstitutiveState &state);

}  // namespace opbench::constitutive
