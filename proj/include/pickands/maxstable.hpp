#pragma once

#include "pickands/estimators.hpp"
#include "pickands/grid.hpp"
#include "pickands/process.hpp"
#include "pickands/random.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pickands {

/// One realization of xi_W(t) = max_i (P_i + W_i(t)) on a grid (Gumbel scale).
struct MaxStablePath {
  GridSpec grid;
  Eigen::VectorXd values;
  std::size_t n_points_used = 0;
  double truncation_bound = 0.0;
  bool stopped_cleanly = false;
};

struct BrownResnickOptions {
  double beta = 1e-4;            // tail mass above the stopping quantile of sup W
  std::size_t k_pilot = 10000;   // pilot paths for that quantile
  std::uint64_t pilot_seed = 0;  // pilot randomness, separate from the main streams
  std::size_t hard_cap = 100000; // Poisson points per realization
};

/// Poisson construction of the Brown-Resnick process with points
/// P_i = -ln(Gamma_i), Gamma_i the arrival times of a unit-rate Poisson
/// process. A realization stops once P_{i+1} + q <= min_t xi(t), where q is
/// the pilot (1 - beta)-quantile of sup_grid W. Immutable after construction.
class BrownResnickSampler {
 public:
  BrownResnickSampler(const ProcessSpec& process, const GridSpec& grid, const BrownResnickOptions& options);

  MaxStablePath sample(RandomStream& rng) const;

  struct SupDraw {
    double value = 0.0;  // sup over the grid of xi
    std::size_t n_points_used = 0;
    bool stopped_cleanly = false;
  };

  /// Only sup_t xi(t): the stopping rule compares against the running
  /// supremum instead of the pointwise minimum, which needs far fewer points.
  SupDraw sample_sup(RandomStream& rng) const;

  double threshold() const { return threshold_; }
  const GridSpec& grid() const { return sampler_.grid(); }

 private:
  PathSampler sampler_;
  BrownResnickOptions options_;
  double threshold_ = 0.0;
};

/// Builds the sampler (pilot seeded from one draw of `rng`) and returns one
/// realization.
MaxStablePath sample_brown_resnick(const ProcessSpec& process, const GridSpec& grid, double beta, std::size_t k_pilot,
                                   RandomStream& rng);

/// The lattice points delta*Z cap [lo, hi]; sampled on the grid spanning
/// [min(lo, 0), max(hi, 0)].
struct Subgrid {
  double delta = 1.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// H_W(E) = E sup_{t in E} e^{W(t)}, so that -ln P(sup_E xi <= x) = H_W(E) e^{-x}.
EstimateResult capacity_functional(const ProcessSpec& process, const Subgrid& set, const MonteCarloOptions& opts);

struct FidisProbe {
  double x = 0.0;
  double p_hat = 0.0;     // empirical P(sup_E xi <= x)
  double lhs = 0.0;       // -ln p_hat
  double lhs_se = 0.0;
  double rhs = 0.0;       // H_W(E) e^{-x}
  double rhs_se = 0.0;
  double z = 0.0;
  bool excluded = false;  // p_hat outside [0.01, 0.99]
  std::string note;
};

struct FidisReport {
  EstimateResult capacity;
  std::vector<FidisProbe> probes;
  std::size_t n_xi = 0;
  double clean_fraction = 0.0;
};

/// Compares the empirical law of sup_E xi (n_xi Brown-Resnick samples)
/// with exp(-H_W(E) e^{-x}) (n_cap capacity samples) at each probe x.
FidisReport validate_fidis(const ProcessSpec& process, const Subgrid& set, std::span<const double> x_probes,
                           std::size_t n_xi, std::size_t n_cap, const BrownResnickOptions& br,
                           const MonteCarloOptions& opts);

struct BlockProbe {
  double x = 0.0;
  double p_hat = 0.0;  // P(sup_{[0,T]} xi <= x + ln T)
  double index_estimate = 0.0;  // -ln(p_hat) e^x
  double index_se = 0.0;
  double z_reference = 0.0;     // against the limit-free reference estimate
  double z_finite_horizon = 0.0;  // against H_W(delta Z cap [0,T]) / T, exact at finite T
  bool excluded = false;
  std::string note;
};

struct BlockCheckReport {
  EstimateResult reference;
  EstimateResult finite_horizon_capacity;
  std::vector<BlockProbe> probes;
  double clean_fraction = 0.0;
  std::string caveat;
};

/// Gumbel-limit check: inverts the empirical law of the block maximum of xi
/// over delta Z cap [0, T] into an extremal-index estimate. `reference`
/// defaults to the limit-free estimate with delta = eta on the default window.
BlockCheckReport extremal_index_block_check(const ProcessSpec& process, double delta, double horizon,
                                            std::span<const double> x_probes, const BrownResnickOptions& br,
                                            const MonteCarloOptions& opts,
                                            std::optional<EstimateResult> reference = std::nullopt);

/// Deterministic shape function F with sup F = F(0) = 0.
class ShapeFunction {
 public:
  enum class Kind { quadratic, abs, tabulated };

  static ShapeFunction quadratic();                 // -t^2
  static ShapeFunction absolute(double a);          // -a|t|
  static ShapeFunction tabulated(std::vector<double> t, std::vector<double> f);

  Kind kind() const { return kind_; }
  double operator()(double t) const;
  double lo() const;
  double hi() const;

 private:
  Kind kind_ = Kind::quadratic;
  double a_ = 1.0;
  std::vector<double> t_;
  std::vector<double> f_;
};

/// delta = 0: 1 / integral of e^F over R; delta > 0: 1 / (delta * sum_k e^{F(k delta)}).
/// Tails are added until their contribution falls below quad_tol times the total.
double m3_constant_deterministic(const ShapeFunction& shape, double delta, double quad_tol = 1e-10);

}  // namespace pickands
