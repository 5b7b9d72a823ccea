#pragma once

#include "pickands/grid.hpp"
#include "pickands/random.hpp"

#include <string>
#include <variant>
#include <vector>

namespace pickands {

/// Brownian motion with drift: mu*t + sigma*B(t).
struct BrownianDrift {
  double mu = 0.0;
  double sigma = 1.0;
};

/// Compound Poisson process with rate `lambda` and jumps jump_sign*Exp(rho).
struct CompoundPoissonExp {
  double lambda = 1.0;
  double rho = 2.0;
  int jump_sign = 1;
};

/// Brownian motion with drift plus negative exponential jumps; spectrally
/// negative.
struct BrownianPlusNegativeCP {
  double mu = 0.0;
  double sigma = 1.0;
  double lambda = 1.0;
  double rho = 1.0;
};

using LevySpec = std::variant<BrownianDrift, CompoundPoissonExp, BrownianPlusNegativeCP>;

struct ExpJumps {
  double rate = 0.0;   // Poisson intensity per unit time
  double decay = 1.0;  // jump sizes are sign * Exp(decay)
  int sign = 1;
};

/// Drift, Gaussian part and exponential jump components of a Levy process.
/// The family is closed under drift compensation and under the exponential
/// tilt that defines the negative half-line.
struct LevyTriplet {
  double drift = 0.0;
  double sigma = 0.0;
  std::vector<ExpJumps> jumps;
};

/// Law of W^- (t >= 0) whose Laplace exponent is Phi(1-theta) - (1-theta)Phi(1).
struct TiltedSpec {
  LevyTriplet law;
};

void validate(const LevySpec& spec);
LevyTriplet to_triplet(const LevySpec& spec);
bool is_spectrally_negative(const LevySpec& spec);
std::string describe(const LevySpec& spec);

/// Open interval of theta on which the Laplace exponent is finite.
struct ThetaInterval {
  double lo;
  double hi;
};
ThetaInterval laplace_domain(const LevyTriplet& law);

/// Phi(theta) = ln E exp(theta X(1)). Throws DomainError outside the domain.
double laplace_exponent(const LevyTriplet& law, double theta);
double laplace_exponent(const LevySpec& spec, double theta);

/// First or second derivative of the Laplace exponent.
double laplace_exponent_derivative(const LevyTriplet& law, double theta, int order = 1);

/// W^+(t) = B^+(t) - Phi(1) t; its exponent Phi(theta) - theta*Phi(1) vanishes at 1.
LevyTriplet drift_compensate(const LevySpec& spec);

TiltedSpec tilt_negative_side(const LevySpec& spec);

/// Which limit-free representation the moment condition guards: the
/// continuous supremum over the continuous integral, or any grid/sum variant.
enum class MomentRoute { continuous, discrete };

struct MomentCheck {
  bool ok = false;
  double required_lo = 0.0;  // Phi must be finite on (required_lo, required_hi)
  double required_hi = 0.0;
  ThetaInterval domain{0.0, 0.0};
  std::string message;
};

inline constexpr double kMomentEpsilon = 0.1;

/// Phi finite on (-2-eps, 3+eps) for the continuous route, (-1-eps, 2+eps)
/// otherwise, with eps = 0.1.
MomentCheck check_moment_conditions(const LevySpec& spec, MomentRoute route);

/// The two candidate closed forms for the extremal index of a spectrally
/// negative process: Phi'(1), and the compensated Phi'(1) - Phi(1).
struct ExtremalIndexCandidates {
  double phi_prime_at_one = 0.0;
  double compensated_prime_at_one = 0.0;
};
ExtremalIndexCandidates extremal_index_candidates(const LevySpec& spec);

/// Two-sided W: W^+(t) for t >= 0 and an independent W^-(-t) for t < 0.
/// Increments on the grid are sampled exactly.
class LevyPathSampler {
 public:
  LevyPathSampler(const LevySpec& spec, GridSpec grid);

  SamplePath sample(RandomStream& rng) const;

  const GridSpec& grid() const { return grid_; }
  const LevyTriplet& positive_law() const { return positive_; }
  const LevyTriplet& negative_law() const { return negative_; }

 private:
  GridSpec grid_;
  LevyTriplet positive_;
  LevyTriplet negative_;
};

/// One increment of a Levy process over time `dt`.
double sample_increment(const LevyTriplet& law, double dt, RandomStream& rng);

SamplePath sample_levy_two_sided(const LevySpec& spec, const GridSpec& grid, RandomStream& rng);

}  // namespace pickands
