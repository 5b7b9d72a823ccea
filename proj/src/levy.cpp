#include "pickands/levy.hpp"

#include "pickands/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pickands {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void validate(const LevySpec& spec) {
  std::visit(overloaded{
                 [](const BrownianDrift& b) {
                   if (!(b.sigma >= 0.0) || !std::isfinite(b.mu)) throw ContractError("brownian_drift: sigma must be >= 0");
                 },
                 [](const CompoundPoissonExp& c) {
                   if (!(c.lambda > 0.0)) throw ContractError("compound_poisson_exp: lambda must be > 0");
                   if (!(c.rho > 0.0)) throw ContractError("compound_poisson_exp: rho must be > 0");
                   if (c.jump_sign != 1 && c.jump_sign != -1) throw ContractError("compound_poisson_exp: jump_sign must be +1 or -1");
                   if (c.jump_sign == 1 && !(c.rho > 1.0)) {
                     throw DomainError("compound_poisson_exp with positive jumps needs rho > 1 for Phi(1) < infinity");
                   }
                 },
                 [](const BrownianPlusNegativeCP& c) {
                   if (!(c.sigma >= 0.0)) throw ContractError("brownian_plus_negative_cp: sigma must be >= 0");
                   if (!(c.lambda > 0.0) || !(c.rho > 0.0)) {
                     throw ContractError("brownian_plus_negative_cp: lambda and rho must be > 0");
                   }
                 },
             },
             spec);
}

LevyTriplet to_triplet(const LevySpec& spec) {
  return std::visit(overloaded{
                        [](const BrownianDrift& b) { return LevyTriplet{b.mu, b.sigma, {}}; },
                        [](const CompoundPoissonExp& c) {
                          return LevyTriplet{0.0, 0.0, {ExpJumps{c.lambda, c.rho, c.jump_sign}}};
                        },
                        [](const BrownianPlusNegativeCP& c) {
                          return LevyTriplet{c.mu, c.sigma, {ExpJumps{c.lambda, c.rho, -1}}};
                        },
                    },
                    spec);
}

bool is_spectrally_negative(const LevySpec& spec) {
  for (const auto& j : to_triplet(spec).jumps) {
    if (j.sign > 0) return false;
  }
  return true;
}

std::string describe(const LevySpec& spec) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const BrownianDrift& b) { os << "levy:brownian_drift(mu=" << b.mu << ";sigma=" << b.sigma << ")"; },
                 [&](const CompoundPoissonExp& c) {
                   os << "levy:compound_poisson_exp(lambda=" << c.lambda << ";rho=" << c.rho << ";sign=" << c.jump_sign
                      << ")";
                 },
                 [&](const BrownianPlusNegativeCP& c) {
                   os << "levy:brownian_plus_negative_cp(mu=" << c.mu << ";sigma=" << c.sigma << ";lambda=" << c.lambda
                      << ";rho=" << c.rho << ")";
                 },
             },
             spec);
  return os.str();
}

ThetaInterval laplace_domain(const LevyTriplet& law) {
  ThetaInterval d{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto& j : law.jumps) {
    // E exp(theta * sign * Exp(decay)) < inf  <=>  sign*theta < decay
    if (j.sign > 0) {
      d.hi = std::min(d.hi, j.decay);
    } else {
      d.lo = std::max(d.lo, -j.decay);
    }
  }
  return d;
}

double laplace_exponent(const LevyTriplet& law, double theta) {
  const auto d = laplace_domain(law);
  if (!(theta > d.lo && theta < d.hi)) {
    std::ostringstream os;
    os << "Laplace exponent is infinite at theta = " << theta << ": finite only on (" << d.lo << ", " << d.hi << ")";
    throw DomainError(os.str());
  }
  double phi = law.drift * theta + 0.5 * law.sigma * law.sigma * theta * theta;
  for (const auto& j : law.jumps) phi += j.rate * (j.decay / (j.decay - j.sign * theta) - 1.0);
  return phi;
}

double laplace_exponent(const LevySpec& spec, double theta) {
  validate(spec);
  return laplace_exponent(to_triplet(spec), theta);
}

double laplace_exponent_derivative(const LevyTriplet& law, double theta, int order) {
  const auto d = laplace_domain(law);
  if (!(theta > d.lo && theta < d.hi)) throw DomainError("Laplace exponent derivative outside the finite domain");
  if (order == 1) {
    double v = law.drift + law.sigma * law.sigma * theta;
    for (const auto& j : law.jumps) {
      const double den = j.decay - j.sign * theta;
      v += j.rate * j.decay * j.sign / (den * den);
    }
    return v;
  }
  if (order == 2) {
    double v = law.sigma * law.sigma;
    for (const auto& j : law.jumps) {
      const double den = j.decay - j.sign * theta;
      v += 2.0 * j.rate * j.decay / (den * den * den);
    }
    return v;
  }
  throw ContractError("only first and second derivatives are available");
}

LevyTriplet drift_compensate(const LevySpec& spec) {
  validate(spec);
  LevyTriplet law = to_triplet(spec);
  law.drift -= laplace_exponent(law, 1.0);
  return law;
}

TiltedSpec tilt_negative_side(const LevySpec& spec) {
  validate(spec);
  const LevyTriplet law = to_triplet(spec);
  const auto domain = laplace_domain(law);
  if (!(domain.lo < 0.0 && domain.hi > 1.0)) {
    throw UnsupportedSpecError("tilting needs Phi finite on a neighbourhood of [0, 1]; restrict to one-sided grids");
  }
  // Phi(1-theta) - (1-theta)Phi(1) term by term:
  //   Gaussian part -> variance sigma^2, drift -sigma^2/2;
  //   jumps (rate, decay, s) -> (rate*decay/(decay-s), decay-s, -s) plus drift rate*s/(decay-s).
  TiltedSpec tilted;
  tilted.law.sigma = law.sigma;
  tilted.law.drift = -0.5 * law.sigma * law.sigma;
  for (const auto& j : law.jumps) {
    const double shifted = j.decay - j.sign;
    tilted.law.jumps.push_back(ExpJumps{j.rate * j.decay / shifted, shifted, -j.sign});
    tilted.law.drift += j.rate * j.sign / shifted;
  }
  return tilted;
}

MomentCheck check_moment_conditions(const LevySpec& spec, MomentRoute route) {
  validate(spec);
  MomentCheck c;
  c.domain = laplace_domain(to_triplet(spec));
  if (route == MomentRoute::continuous) {
    c.required_lo = -2.0 - kMomentEpsilon;
    c.required_hi = 3.0 + kMomentEpsilon;
  } else {
    c.required_lo = -1.0 - kMomentEpsilon;
    c.required_hi = 2.0 + kMomentEpsilon;
  }
  c.ok = c.domain.lo <= c.required_lo && c.domain.hi >= c.required_hi;
  std::ostringstream os;
  os << "Phi must be finite on (" << c.required_lo << ", " << c.required_hi << "); finite on (" << c.domain.lo << ", "
     << c.domain.hi << ")";
  if (!c.ok) {
    if (c.domain.hi < c.required_hi) os << "; violated upper bound theta < " << c.required_hi;
    if (c.domain.lo > c.required_lo) os << "; violated lower bound theta > " << c.required_lo;
  }
  c.message = os.str();
  return c;
}

ExtremalIndexCandidates extremal_index_candidates(const LevySpec& spec) {
  validate(spec);
  const LevyTriplet law = to_triplet(spec);
  ExtremalIndexCandidates out;
  out.phi_prime_at_one = laplace_exponent_derivative(law, 1.0, 1);
  out.compensated_prime_at_one = out.phi_prime_at_one - laplace_exponent(law, 1.0);
  return out;
}

double sample_increment(const LevyTriplet& law, double dt, RandomStream& rng) {
  double x = law.drift * dt;
  if (law.sigma > 0.0) x += law.sigma * std::sqrt(dt) * std::normal_distribution<double>()(rng);
  for (const auto& j : law.jumps) {
    const auto count = std::poisson_distribution<long>(j.rate * dt)(rng);
    if (count > 0) {
      x += j.sign * std::gamma_distribution<double>(static_cast<double>(count), 1.0 / j.decay)(rng);
    }
  }
  return x;
}

LevyPathSampler::LevyPathSampler(const LevySpec& spec, GridSpec grid) : grid_(grid) {
  grid_.validate();
  positive_ = drift_compensate(spec);
  if (grid_.first_index() < 0) {
    try {
      negative_ = tilt_negative_side(spec).law;
    } catch (const UnsupportedSpecError& e) {
      throw UnsupportedSpecError(std::string(e.what()) + " (use window_lo = 0 for one-sided estimation)");
    }
  }
}

SamplePath LevyPathSampler::sample(RandomStream& rng) const {
  SamplePath path{grid_, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid_.size()))};
  const auto zero = static_cast<Eigen::Index>(grid_.zero_offset());
  for (Eigen::Index i = zero + 1; i < path.values.size(); ++i) {
    path.values[i] = path.values[i - 1] + sample_increment(positive_, grid_.delta, rng);
  }
  for (Eigen::Index i = zero - 1; i >= 0; --i) {
    path.values[i] = path.values[i + 1] + sample_increment(negative_, grid_.delta, rng);
  }
  return path;
}

SamplePath sample_levy_two_sided(const LevySpec& spec, const GridSpec& grid, RandomStream& rng) {
  return LevyPathSampler(spec, grid).sample(rng);
}

}  // namespace pickands
