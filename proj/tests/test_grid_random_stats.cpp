#include "pickands/errors.hpp"
#include "pickands/grid.hpp"
#include "pickands/parallel.hpp"
#include "pickands/random.hpp"
#include "pickands/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace pickands;

TEST(Grid, PointsAreLatticeMultiplesContainingZero) {
  const GridSpec g = make_grid(0.5, -1.2, 2.0);
  ASSERT_EQ(g.size(), 7u);
  EXPECT_DOUBLE_EQ(g.time_at(0), -1.0);
  EXPECT_DOUBLE_EQ(g.time_at(g.size() - 1), 2.0);
  EXPECT_EQ(g.time_at(g.zero_offset()), 0.0);
}

TEST(Grid, SinglePointGrid) {
  const GridSpec g = make_grid(1.0, 0.0, 0.0);
  EXPECT_EQ(g.size(), 1u);
  EXPECT_EQ(g.zero_offset(), 0u);
}

TEST(Grid, RejectsBadSpecs) {
  EXPECT_THROW(make_grid(0.0, -1.0, 1.0), ContractError);
  EXPECT_THROW(make_grid(0.1, 0.5, 1.0), ContractError);
  EXPECT_THROW(make_grid(0.1, -1.0, 1.0, 0.15), ContractError);
  EXPECT_THROW(make_grid(0.1, -1.0, 1.0, 0.0, 0.25), ContractError);
  EXPECT_NO_THROW(make_grid(0.1, -1.0, 1.0, 0.3, 0.2));
}

TEST(Grid, RestrictWindowKeepsValues) {
  SamplePath p{make_grid(1.0, -3.0, 3.0), Eigen::VectorXd::LinSpaced(7, -3.0, 3.0)};
  const SamplePath r = restrict_window(p, -1.0, 2.0);
  ASSERT_EQ(r.values.size(), 4);
  EXPECT_EQ(r.values[0], -1.0);
  EXPECT_EQ(r.at_zero(), 0.0);
  EXPECT_THROW(restrict_window(p, -5.0, 1.0), ContractError);
}

TEST(Random, DerivedSeedsSeparateIndicesAndTags) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
  EXPECT_NE(derive_seed(1, 2, StreamTag::replicate), derive_seed(1, 2, StreamTag::pilot));
  auto a = replicate_stream(9, 4);
  auto b = replicate_stream(9, 4);
  EXPECT_EQ(a(), b());
}

TEST(Parallel, ResultsIndependentOfWorkerCount) {
  auto fn = [](std::size_t i) {
    auto rng = replicate_stream(5, i);
    return std::normal_distribution<double>()(rng);
  };
  const auto one = run_replicates<double>(1000, 1, fn);
  const auto many = run_replicates<double>(1000, 4, fn);
  EXPECT_EQ(one, many);
}

TEST(Parallel, PropagatesExceptions) {
  auto fn = [](std::size_t i) -> double {
    if (i == 700) throw std::runtime_error("boom");
    return 0.0;
  };
  EXPECT_THROW(run_replicates<double>(1000, 3, fn), std::runtime_error);
}

TEST(Stats, MeanWithError) {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const auto m = mean_with_error(xs);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(m.n, 4u);
}

TEST(Stats, NormalCdfAndKolmogorov) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
  // Classical 5% critical value of the Kolmogorov distribution.
  EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(Stats, KsAcceptsMatchingLawAndRejectsShift) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  std::vector<double> xs(5000), ys(5000);
  for (auto& x : xs) x = n01(rng);
  for (auto& y : ys) y = n01(rng) + 0.2;
  EXPECT_GT(ks_test(xs, normal_cdf).p_value, 0.001);
  EXPECT_LT(ks_test(ys, normal_cdf).p_value, 1e-6);
  EXPECT_LT(ks_test(xs, ys).p_value, 1e-6);
}

TEST(Stats, GumbelCdf) {
  EXPECT_DOUBLE_EQ(gumbel_cdf(0.0), std::exp(-1.0));
}
