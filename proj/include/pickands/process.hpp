#pragma once

#include "pickands/gaussian.hpp"
#include "pickands/grid.hpp"
#include "pickands/levy.hpp"
#include "pickands/random.hpp"
#include "pickands/variance_function.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pickands {

/// W(t) = B(t) - sigma^2(t)/2.
struct GaussianProcess {
  VarianceFunction variance;
};

/// Two-sided drift-compensated Levy process.
struct LevyProcess {
  LevySpec spec;
};

/// Discrete law of the mixing variable S > 0.
struct MixingLaw {
  std::vector<double> values;
  std::vector<double> probabilities;
};

/// W(t) = S B(t) - S^2 sigma^2(t)/2 with S independent of B.
struct VarianceMixedProcess {
  VarianceFunction variance;
  MixingLaw mixing;
};

using ProcessSpec = std::variant<GaussianProcess, LevyProcess, VarianceMixedProcess>;

std::string describe(const ProcessSpec& process);

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

/// Symmetric truncation window [-L, L]: the smallest L at which the mean
/// drift of W(L) reaches six standard deviations of W(L).
Window default_window(const ProcessSpec& process);

/// Prepared sampler of W on a fixed grid. Immutable and thread-safe; each
/// call consumes only the given stream.
class PathSampler {
 public:
  PathSampler(const ProcessSpec& process, const GridSpec& grid);

  SamplePath sample(RandomStream& rng) const;

  const GridSpec& grid() const { return grid_; }
  std::vector<std::string> diagnostics() const;

 private:
  GridSpec grid_;
  std::optional<GaussianPathSampler> gaussian_;
  std::optional<LevyPathSampler> levy_;
  std::optional<MixingLaw> mixing_;
  Eigen::VectorXd half_variance_;  // sigma^2(t)/2 on the grid
};

}  // namespace pickands
