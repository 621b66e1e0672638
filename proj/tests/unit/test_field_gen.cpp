// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "opbench/errors.hpp"
#include "opbench/field_gen/random_fields.hpp"
#include "opbench/field_gen/rng.hpp"

using namespace opbench;
using namespace opbench::field_gen;

TEST(CounterRng, SameSeedSameStream)
{
  CounterRng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i)
  {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
}

TEST(CounterRng, SkipMatchesDraws)
{
  CounterRng a(7), b(7);
  for (int i = 0; i < 10; ++i)
  {
    a.next_u64();
  }
  b.skip(10);
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(CounterRng, UniformMomentsAndBelowRange)
{
  CounterRng r(1);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i)
  {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 0.005);
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 0.002);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i)
  {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    ++hist[k];
  }
  for (int h : hist)
  {
    EXPECT_NEAR(h, 10000, 500);
  }
}

TEST(CounterRng, NormalMoments)
{
  CounterRng r(99);
  double s = 0.0, s2 = 0.0, s4 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i)
  {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
  EXPECT_NEAR(s4 / n, 3.0, 0.1);
}

TEST(DeriveSeed, DistinctChildren)
{
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i)
  {
    seen.insert(derive_seed(5, i));
  }
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_NE(derive_seed(5, 0), derive_seed(6, 0));
}

TEST(Grf, ZeroVarianceIsConstantMean)
{
  GrfSpec s;
  s.variance = 0.0;
  s.mean = 1.0;
  s.n_points = 5;
  const auto f = generate_grf(s);
  ASSERT_EQ(f.values.size(), 5u);
  for (double v : f.values)
  {
    EXPECT_EQ(v, 1.0);
  }
}

TEST(Grf, EquispacedCoordinatesWithEndpoints)
{
  GrfSpec s;
  s.n_points = 11;
  s.domain_length = 2.0;
  const auto f = generate_grf(s);
  ASSERT_EQ(f.coords.size(), 11u);
  EXPECT_EQ(f.coords.front(), 0.0);
  EXPECT_EQ(f.coords.back(), 2.0);
  for (std::size_t i = 1; i < f.coords.size(); ++i)
  {
    EXPECT_GT(f.coords[i], f.coords[i - 1]);
  }
}

TEST(Grf, Deterministic)
{
  GrfSpec s;
  s.seed = 1234;
  EXPECT_EQ(generate_grf(s), generate_grf(s));
  GrfSpec t = s;
  t.seed = 1235;
  EXPECT_NE(generate_grf(s).values, generate_grf(t).values);
}

TEST(Grf, InvalidSpecsThrow)
{
  GrfSpec s;
  s.n_points = 1;
  EXPECT_THROW(generate_grf(s), GenerationError);
  s = GrfSpec{};
  s.correlation_length = 0.0;
  EXPECT_THROW(generate_grf(s), GenerationError);
  s = GrfSpec{};
  s.variance = -1.0;
  EXPECT_THROW(generate_grf(s), GenerationError);
}

// Monte-Carlo statistics over 10,000 seeds, compared with the analytic
// squared-exponential covariance.
class GrfStatistics : public ::testing::Test
{
protected:
  static void SetUpTestSuite()
  {
    samples_ = new std::vector<std::vector<double>>();
    GrfSpec s;
    s.n_points = 255;
    s.variance = 1.0;
    s.mean = 0.0;
    s.correlation_length = 0.1;
    for (std::uint64_t k = 0; k < 10000; ++k)
    {
      s.seed = derive_seed(2024, k);
      samples_->push_back(generate_grf(s).values);
    }
  }
  static void TearDownTestSuite()
  {
    delete samples_;
    samples_ = nullptr;
  }
  static std::vector<std::vector<double>> *samples_;
};

std::vector<std::vector<double>> *GrfStatistics::samples_ = nullptr;

TEST_F(GrfStatistics, MeanAtFixedPoint)
{
  double s = 0.0;
  for (const auto &v : *samples_)
  {
    s += v[127];
  }
  EXPECT_NEAR(s / samples_->size(), 0.0, 0.05);
}

TEST_F(GrfStatistics, CovarianceAtLagPointOne)
{
  // Sensor spacing is 1/254, so the closest pair to lag 0.1 is 25 apart.
  const std::size_t i = 100, j = 125;
  const double lag = static_cast<double>(j - i) / 254.0;
  const double expected = std::exp(-lag * lag / (2.0 * 0.01));
  double s = 0.0;
  for (const auto &v : *samples_)
  {
    s += v[i] * v[j];
  }
  EXPECT_NEAR(s / samples_->size(), expected, 0.05);
  EXPECT_NEAR(s / samples_->size(), std::exp(-0.5), 0.05);
}

TEST_F(GrfStatistics, VarianceWithinTenPercentEverywhere)
{
  for (std::size_t p = 0; p < 255; ++p)
  {
    double s = 0.0, s2 = 0.0;
    for (const auto &v : *samples_)
    {
      s += v[p];
      s2 += v[p] * v[p];
    }
    const double n = static_cast<double>(samples_->size());
    const double var = s2 / n - (s / n) * (s / n);
    EXPECT_NEAR(var, 1.0, 0.1) << "sensor " << p;
  }
}

TEST(Rbf, ZeroKnotsGiveZeroProfile)
{
  RbfProfileSpec s;
  s.n_knots = 2;
  s.knot_low = 0.0;
  s.knot_high = 0.0;
  const auto f = generate_rbf_profile(s);
  for (double v : f.values)
  {
    EXPECT_NEAR(v, 0.0, 1e-8);
  }
}

TEST(Rbf, ReproducesKnotsOverManySeeds)
{
  for (std::uint64_t seed = 0; seed < 200; ++seed)
  {
    RbfProfileSpec s;
    s.seed = seed;
    s.knot_low = -2.0;
    s.knot_high = 3.0;
    const RbfInterpolant f(s);
    double scale = 0.0;
    for (double v : f.knot_values())
    {
      scale = std::max(scale, std::abs(v));
    }
    for (std::size_t k = 0; k < f.knot_times().size(); ++k)
    {
      EXPECT_NEAR(f(f.knot_times()[k]), f.knot_values()[k], 1e-8 * scale);
      EXPECT_GE(f.knot_values()[k], s.knot_low);
      EXPECT_LE(f.knot_values()[k], s.knot_high);
    }
  }
}

TEST(Rbf, TrendSortsKnots)
{
  for (auto trend : {Trend::increasing, Trend::decreasing})
  {
    RbfProfileSpec s;
    s.trend = trend;
    s.seed = 17;
    const RbfInterpolant f(s);
    for (std::size_t k = 1; k < f.knot_values().size(); ++k)
    {
      if (trend == Trend::increasing)
      {
        EXPECT_LE(f.knot_values()[k - 1], f.knot_values()[k]);
      }
      else
      {
        EXPECT_GE(f.knot_values()[k - 1], f.knot_values()[k]);
      }
    }
  }
}

TEST(Rbf, OutputShapeAndDeterminism)
{
  RbfProfileSpec s;
  s.n_points = 101;
  s.seed = 3;
  const auto a = generate_rbf_profile(s);
  EXPECT_EQ(a.values.size(), 101u);
  EXPECT_EQ(a.coords.size(), 101u);
  EXPECT_EQ(a, generate_rbf_profile(s));
}

TEST(Rbf, InvalidSpecsThrow)
{
  RbfProfileSpec s;
  s.n_knots = 1;
  EXPECT_THROW(generate_rbf_profile(s), GenerationError);
  s = RbfProfileSpec{};
  s.knot_low = 1.0;
  s.knot_high = 0.0;
  EXPECT_THROW(generate_rbf_profile(s), GenerationError);
}

TEST(BatchGenerate, MatchesSingleCalls)
{
  std::vector<InputSpec> specs;
  for (std::uint64_t k = 0; k < 3; ++k)
  {
    GrfSpec g;
    g.seed = 100 + k;
    specs.push_back(g);
  }
  RbfProfileSpec r;
  r.seed = 5;
  specs.push_back(r);
  const auto out = batch_generate(specs, 1);
  ASSERT_EQ(out.size(), specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i)
  {
    EXPECT_EQ(out[i], generate(specs[i]));
  }
  EXPECT_EQ(batch_generate(specs, 3), out);
}

TEST(BatchGenerate, EmptyInEmptyOut)
{
  EXPECT_TRUE(batch_generate({}, 2).empty());
}

TEST(BatchGenerate, TenThousandDistinct)
{
  std::vector<InputSpec> specs;
  for (std::uint64_t k = 0; k < 10000; ++k)
  {
    GrfSpec g;
    g.n_points = 32;
    g.seed = derive_seed(77, k);
    specs.push_back(g);
  }
  const auto out = batch_generate(specs, 2);
  std::set<std::vector<double>> distinct;
  for (const auto &f : out)
  {
    distinct.insert(f.values);
  }
  EXPECT_EQ(distinct.size(), 10000u);
}

TEST(BatchGenerate, ErrorCarriesIndex)
{
  std::vector<InputSpec> specs(3, GrfSpec{});
  std::get<GrfSpec>(specs[2]).n_points = 1;
  try
  {
    batch_generate(specs, 1);
    FAIL() << "expected GenerationError";
  }
  catch (const GenerationError &e)
  {
    EXPECT_EQ(e.index(), 2u);
  }
}
