#include "pickands/errors.hpp"
#include "pickands/levy.hpp"
#include "pickands/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace pickands;

namespace {

const LevySpec kBrownian = BrownianDrift{0.0, std::sqrt(2.0)};
const LevySpec kPositiveJumps = CompoundPoissonExp{1.0, 2.0, 1};
const LevySpec kNegativeJumps = CompoundPoissonExp{1.5, 1.0, -1};
const LevySpec kComposite = BrownianPlusNegativeCP{0.2, 0.8, 1.0, 1.5};

double mean_exp(const LevyTriplet& law, double theta, double dt, std::size_t n, std::uint64_t seed, double* se) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = replicate_stream(seed, i);
    xs[i] = std::exp(theta * sample_increment(law, dt, rng));
  }
  const auto m = mean_with_error(xs);
  *se = m.std_error;
  return m.mean;
}

}  // namespace

TEST(LaplaceExponent, ClosedForms) {
  EXPECT_DOUBLE_EQ(laplace_exponent(kBrownian, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(laplace_exponent(kPositiveJumps, 1.0), 1.0);
  for (const auto& spec : {kBrownian, kPositiveJumps, kNegativeJumps, kComposite}) {
    EXPECT_DOUBLE_EQ(laplace_exponent(spec, 0.0), 0.0);
  }
  EXPECT_NEAR(laplace_exponent(kNegativeJumps, 0.5), 1.5 * (1.0 / 1.5 - 1.0), 1e-15);
  EXPECT_NEAR(laplace_exponent(kComposite, 2.0), 0.4 + 0.64 * 2.0 + 1.0 * (1.5 / 3.5 - 1.0), 1e-14);
}

TEST(LaplaceExponent, DomainErrorsNameTheBound) {
  EXPECT_THROW(laplace_exponent(kPositiveJumps, 2.0), DomainError);
  EXPECT_THROW(laplace_exponent(kNegativeJumps, -1.0), DomainError);
  try {
    laplace_exponent(kPositiveJumps, 3.0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
}

TEST(LaplaceExponent, MatchesMonteCarloAtProbes) {
  for (const auto& spec : {kPositiveJumps, kNegativeJumps, kComposite}) {
    const LevyTriplet law = to_triplet(spec);
    for (double theta : {-0.5, 0.5, 1.0}) {
      double se = 0.0;
      const double m = mean_exp(law, theta, 1.0, 40000, 21, &se);
      EXPECT_NEAR(m, std::exp(laplace_exponent(spec, theta)), 4.0 * se) << describe(spec) << " theta=" << theta;
    }
  }
}

TEST(LaplaceExponent, Derivatives) {
  const LevyTriplet law = to_triplet(kComposite);
  const double h = 1e-5;
  const double fd = (laplace_exponent(law, 1.0 + h) - laplace_exponent(law, 1.0 - h)) / (2 * h);
  EXPECT_NEAR(laplace_exponent_derivative(law, 1.0, 1), fd, 1e-8);
  const double fd2 = (laplace_exponent(law, 1.0 + h) - 2 * laplace_exponent(law, 1.0) + laplace_exponent(law, 1.0 - h)) / (h * h);
  EXPECT_NEAR(laplace_exponent_derivative(law, 1.0, 2), fd2, 1e-4);
}

TEST(Compensation, PsiPlusVanishesAtOneAndIgnoresDrift) {
  for (const auto& spec : {kBrownian, kPositiveJumps, kNegativeJumps, kComposite}) {
    EXPECT_NEAR(laplace_exponent(drift_compensate(spec), 1.0), 0.0, 1e-14) << describe(spec);
  }
  const LevyTriplet w = drift_compensate(kBrownian);
  EXPECT_DOUBLE_EQ(w.drift, -1.0);
  EXPECT_DOUBLE_EQ(w.sigma * w.sigma, 2.0);
  const LevyTriplet shifted = drift_compensate(BrownianDrift{3.0, std::sqrt(2.0)});
  EXPECT_NEAR(shifted.drift, w.drift, 1e-14);
}

TEST(Tilt, MatchesExponentIdentity) {
  for (const auto& spec : {kBrownian, kPositiveJumps, kNegativeJumps, kComposite}) {
    const LevyTriplet minus = tilt_negative_side(spec).law;
    const double phi1 = laplace_exponent(spec, 1.0);
    EXPECT_NEAR(laplace_exponent(minus, 0.0), 0.0, 1e-14);
    EXPECT_NEAR(laplace_exponent(minus, 1.0), 0.0, 1e-14);
    for (double theta : {-0.4, 0.3, 0.7, 1.2}) {
      double expected = 0.0;
      try {
        expected = laplace_exponent(spec, 1.0 - theta) - (1.0 - theta) * phi1;
      } catch (const DomainError&) {
        continue;
      }
      EXPECT_NEAR(laplace_exponent(minus, theta), expected, 1e-12) << describe(spec) << " theta=" << theta;
    }
  }
  const LevyTriplet bm = tilt_negative_side(kBrownian).law;
  EXPECT_DOUBLE_EQ(bm.drift, -1.0);
  EXPECT_DOUBLE_EQ(bm.sigma * bm.sigma, 2.0);
}

TEST(Validation, RejectsBadSpecs) {
  EXPECT_THROW(validate(LevySpec{CompoundPoissonExp{1.0, 0.8, 1}}), DomainError);
  EXPECT_THROW(validate(LevySpec{CompoundPoissonExp{0.0, 2.0, 1}}), ContractError);
  EXPECT_THROW(validate(LevySpec{CompoundPoissonExp{1.0, 2.0, 0}}), ContractError);
  EXPECT_THROW(validate(LevySpec{BrownianDrift{0.0, -1.0}}), ContractError);
  EXPECT_TRUE(is_spectrally_negative(kComposite));
  EXPECT_FALSE(is_spectrally_negative(kPositiveJumps));
}

TEST(MomentConditions, Routes) {
  EXPECT_TRUE(check_moment_conditions(kBrownian, MomentRoute::continuous).ok);
  const LevySpec light = CompoundPoissonExp{1.0, 1.5, 1};
  EXPECT_FALSE(check_moment_conditions(light, MomentRoute::continuous).ok);
  EXPECT_FALSE(check_moment_conditions(light, MomentRoute::discrete).ok);
  const LevySpec medium = CompoundPoissonExp{1.0, 2.5, 1};
  EXPECT_FALSE(check_moment_conditions(medium, MomentRoute::continuous).ok);
  EXPECT_TRUE(check_moment_conditions(medium, MomentRoute::discrete).ok);
  const auto c = check_moment_conditions(light, MomentRoute::continuous);
  EXPECT_DOUBLE_EQ(c.required_lo, -2.0 - kMomentEpsilon);
  EXPECT_DOUBLE_EQ(c.required_hi, 3.0 + kMomentEpsilon);
}

TEST(ExtremalIndexCandidates, BrownianValues) {
  const auto c = extremal_index_candidates(kBrownian);
  EXPECT_NEAR(c.phi_prime_at_one, 2.0, 1e-14);
  EXPECT_NEAR(c.compensated_prime_at_one, 1.0, 1e-14);
}

TEST(LevySampler, ZeroAtOriginAndMartingaleBothSides) {
  for (const auto& spec : {kBrownian, kComposite, kNegativeJumps}) {
    const GridSpec g = make_grid(0.5, -2.0, 2.0);
    const LevyPathSampler sampler(spec, g);
    constexpr std::size_t n = 20000;
    std::vector<double> plus(n), minus(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = replicate_stream(22, i);
      const SamplePath w = sampler.sample(rng);
      ASSERT_EQ(w.at_zero(), 0.0);
      plus[i] = std::exp(w.values[6]);
      minus[i] = std::exp(w.values[2]);
    }
    const auto mp = mean_with_error(plus);
    const auto mm = mean_with_error(minus);
    EXPECT_NEAR(mp.mean, 1.0, 4.0 * mp.std_error) << describe(spec);
    EXPECT_NEAR(mm.mean, 1.0, 4.0 * mm.std_error) << describe(spec);
  }
}

TEST(LevySampler, StationaryIncrements) {
  const GridSpec g = make_grid(0.5, 0.0, 4.0);
  const LevyPathSampler sampler(kComposite, g);
  constexpr std::size_t n = 10000;
  std::vector<double> early(n), late(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = replicate_stream(23, i);
    const SamplePath w = sampler.sample(rng);
    early[i] = w.values[1] - w.values[0];
    late[i] = w.values[8] - w.values[7];
  }
  EXPECT_GT(ks_test(early, late).p_value, 0.001);
}

TEST(LevySampler, DescribeIsCommaFree) {
  EXPECT_EQ(describe(kBrownian).find(','), std::string::npos);
}
