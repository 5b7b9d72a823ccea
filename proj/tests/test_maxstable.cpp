#include "pickands/errors.hpp"
#include "pickands/maxstable.hpp"
#include "pickands/stats.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace pickands;
using pickands::testing::brownian;
using pickands::testing::two_point_capacity;
using pickands::testing::z_score;

namespace {

BrownResnickOptions small_pilot(std::uint64_t seed) {
  BrownResnickOptions br;
  br.k_pilot = 2000;
  br.pilot_seed = seed;
  return br;
}

}  // namespace

TEST(BrownResnick, SinglePointIsGumbel) {
  const GridSpec g = make_grid(1.0, 0.0, 0.0);
  const BrownResnickSampler sampler(brownian(), g, small_pilot(41));
  std::vector<double> xs;
  for (std::size_t i = 0; i < 10000; ++i) {
    auto rng = replicate_stream(41, i);
    const auto xi = sampler.sample(rng);
    ASSERT_TRUE(xi.stopped_cleanly);
    ASSERT_GE(xi.n_points_used, 1u);
    xs.push_back(xi.values[0]);
  }
  EXPECT_GT(ks_test(xs, gumbel_cdf).p_value, 0.001);
}

TEST(BrownResnick, FirstPointDominatesAtOrigin) {
  // xi(0) >= P_1 = -ln(E_1): replay the first exponential of the stream.
  const GridSpec g = make_grid(0.5, -2.0, 2.0);
  const BrownResnickSampler sampler(brownian(), g, small_pilot(42));
  for (std::size_t i = 0; i < 2000; ++i) {
    auto rng = replicate_stream(42, i);
    auto replay = replicate_stream(42, i);
    const double p1 = -std::log(std::exponential_distribution<double>(1.0)(replay));
    const auto xi = sampler.sample(rng);
    ASSERT_GE(xi.values[static_cast<Eigen::Index>(g.zero_offset())], p1);
    ASSERT_TRUE(xi.values.allFinite());
    ASSERT_EQ(xi.truncation_bound, sampler.threshold());
  }
}

TEST(BrownResnick, StationaryMarginals) {
  const GridSpec g = make_grid(0.5, -2.0, 2.0);
  const BrownResnickSampler sampler(brownian(), g, small_pilot(43));
  std::vector<double> left, right;
  for (std::size_t i = 0; i < 10000; ++i) {
    auto rng = replicate_stream(43, i);
    const auto xi = sampler.sample(rng);
    if (!xi.stopped_cleanly) continue;
    left.push_back(xi.values[0]);
    right.push_back(xi.values[xi.values.size() - 1]);
  }
  EXPECT_GT(ks_test(left, right).p_value, 0.001);
  EXPECT_GT(ks_test(right, gumbel_cdf).p_value, 0.001);
}

TEST(BrownResnick, OptionValidation) {
  BrownResnickOptions br;
  br.beta = 0.0;
  EXPECT_THROW(BrownResnickSampler(brownian(), make_grid(1.0, 0.0, 1.0), br), ContractError);
}

TEST(Capacity, SinglePointTwoPointAndShiftInvariance) {
  const MonteCarloOptions opts{40000, 44, 1};
  const auto one = capacity_functional(brownian(), Subgrid{1.0, 0.0, 0.0}, opts);
  EXPECT_DOUBLE_EQ(one.value, 1.0);
  const auto two = capacity_functional(brownian(), Subgrid{1.0, 0.0, 1.0}, opts);
  EXPECT_LE(std::abs(z_score(two, two_point_capacity(1.0))), 3.0);
  const auto shifted = capacity_functional(brownian(), Subgrid{1.0, 5.0, 6.0}, {40000, 45, 1});
  EXPECT_LE(std::abs(combined_z(two, shifted)), 3.0);
  EXPECT_THROW(capacity_functional(brownian(), Subgrid{1.0, 0.2, 0.8}, opts), ContractError);
}

TEST(Capacity, BruteForceTwoPointOracle) {
  // Independent oracle: max(1, e^X) with X ~ N(-v/2, v), v = sigma^2(delta).
  std::mt19937_64 rng(46);
  const double v = 2.0;
  std::normal_distribution<double> x(-v / 2.0, std::sqrt(v));
  double sum = 0.0;
  constexpr int n = 1000000;
  for (int i = 0; i < n; ++i) sum += std::max(1.0, std::exp(x(rng)));
  EXPECT_NEAR(sum / n, two_point_capacity(1.0), 0.006);
}

TEST(Fidis, TwoPointSetAgreesWithCapacity) {
  const std::vector<double> xs = {-1.0, 0.0, 1.0, 2.0, 9.0};
  const MonteCarloOptions opts{20000, 47, 1};
  const auto rep = validate_fidis(brownian(), Subgrid{1.0, 0.0, 1.0}, xs, 20000, 20000, small_pilot(47), opts);
  ASSERT_EQ(rep.probes.size(), xs.size());
  for (const auto& p : rep.probes) {
    if (p.x == 9.0) {
      EXPECT_TRUE(p.excluded);
      EXPECT_FALSE(p.note.empty());
      continue;
    }
    EXPECT_FALSE(p.excluded);
    EXPECT_TRUE(std::isfinite(p.z));
    EXPECT_LE(std::abs(p.z), 3.5) << "x=" << p.x;
  }
  EXPECT_GT(rep.clean_fraction, 0.99);
}

TEST(BlockCheck, ReportsCleanFractionAndFiniteHorizonAgreement) {
  const std::vector<double> xs = {0.0};
  const MonteCarloOptions opts{10000, 48, 1};
  EstimateResult reference;
  reference.value = 1.0;
  reference.std_error = 0.01;
  const auto rep = extremal_index_block_check(brownian(), 1.0, 1.0, xs, small_pilot(48), opts, reference);
  ASSERT_EQ(rep.probes.size(), 1u);
  EXPECT_GT(rep.clean_fraction, 0.99);
  EXPECT_LE(std::abs(rep.probes[0].z_finite_horizon), 3.5);
  EXPECT_FALSE(rep.caveat.empty());
}

TEST(M3Constants, DeterministicShapes) {
  EXPECT_NEAR(m3_constant_deterministic(ShapeFunction::quadratic(), 0.0), 1.0 / std::sqrt(std::numbers::pi), 1e-8);
  EXPECT_NEAR(m3_constant_deterministic(ShapeFunction::absolute(1.0), 0.0), 0.5, 1e-8);
  // Direct summation oracle for sum_k e^{-k^2}.
  double s = 0.0;
  for (int k = -10; k <= 10; ++k) s += std::exp(-static_cast<double>(k * k));
  EXPECT_NEAR(m3_constant_deterministic(ShapeFunction::quadratic(), 1.0), 1.0 / s, 1e-9);
  EXPECT_NEAR(1.0 / s, 0.5641312, 1e-7);
  // abs(a) on delta*Z: delta * (1 + 2 e^{-a delta} / (1 - e^{-a delta})).
  const double q = std::exp(-0.5);
  EXPECT_NEAR(m3_constant_deterministic(ShapeFunction::absolute(1.0), 0.5), 1.0 / (0.5 * (1.0 + 2.0 * q / (1.0 - q))), 1e-9);
}

TEST(M3Constants, TabulatedShapes) {
  std::vector<double> t, f;
  for (int k = -80; k <= 80; ++k) {
    t.push_back(0.25 * k);
    f.push_back(-2.0 * std::abs(0.25 * k));
  }
  const double q = std::exp(-0.5);
  EXPECT_NEAR(m3_constant_deterministic(ShapeFunction::tabulated(t, f), 0.25), 1.0 / (0.25 * (1.0 + 2.0 * q / (1.0 - q))), 1e-8);
  EXPECT_NEAR(m3_constant_deterministic(ShapeFunction::tabulated(t, f), 0.0), 1.0, 1e-3);
  const auto short_table = ShapeFunction::tabulated({-1.0, 0.0, 1.0}, {-0.1, 0.0, -0.1});
  EXPECT_THROW(m3_constant_deterministic(short_table, 0.5), DomainError);
  EXPECT_THROW(m3_constant_deterministic(short_table, 0.0), DomainError);
  EXPECT_THROW(ShapeFunction::tabulated({-1.0, 0.0, 1.0}, {-0.1, 0.2, -0.1}), ContractError);
}
