#pragma once

#include "pickands/grid.hpp"
#include "pickands/random.hpp"
#include "pickands/variance_function.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace pickands {

/// Exact sampler of a centered Gaussian process B with stationary increments
/// and B(0) = 0 on a uniform two-sided grid.
///
/// Power variograms use circulant embedding of the stationary increments,
/// padded to a power of two (Davies-Harte); slightly negative eigenvalues
/// (>= -1e-10 * max) are clipped with a diagnostic, more negative ones switch
/// to the dense route. Tabulated variograms always use a Cholesky factor of
/// the covariance of (B(t))_{t != 0}, jittered by 1e-12 * trace / n and
/// doubled at most three times.
///
/// Immutable after construction; share across threads freely.
class GaussianPathSampler {
 public:
  GaussianPathSampler(VarianceFunction sigma2, GridSpec grid);

  /// One realization of B (before drift).
  SamplePath sample(RandomStream& rng) const;

  const GridSpec& grid() const { return grid_; }
  const VarianceFunction& variance() const { return sigma2_; }
  bool uses_circulant() const { return circulant_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  bool try_circulant();
  void build_dense();
  void sample_circulant(RandomStream& rng, Eigen::Ref<Eigen::VectorXd> values) const;
  void sample_dense(RandomStream& rng, Eigen::Ref<Eigen::VectorXd> values) const;

  VarianceFunction sigma2_;
  GridSpec grid_;
  bool circulant_ = false;
  Eigen::Index embedding_size_ = 0;
  Eigen::VectorXd sqrt_eigenvalues_;  // already divided by sqrt(embedding size)
  Eigen::MatrixXd factor_;            // lower Cholesky factor, dense route
  std::vector<std::string> diagnostics_;
};

SamplePath sample_gaussian_path(const VarianceFunction& sigma2, const GridSpec& grid, RandomStream& rng);

/// W(t) = B(t) - sigma^2(t) / 2, so that E e^{W(t)} = 1.
SamplePath drift_adjust_gaussian(const SamplePath& b, const VarianceFunction& sigma2);

/// W(t) = s B(t) - s^2 sigma^2(t) / 2 for an independent mixing value s > 0.
SamplePath sample_variance_mixed(const SamplePath& b, const VarianceFunction& sigma2, double s);

/// Finite-range proxies of the liminf conditions on sigma^2 under which the
/// limit-free representation is known to hold. Advisory only.
struct ConditionReport {
  bool sandwich_holds = false;       // c*ell(t) <= sigma^2(t) <= ell(t)
  double min_ell_over_log = 0.0;     // min ell(t)/ln t
  double ell_threshold = 0.0;        // 8 / (c^2 + 8c - 8), +inf when not positive
  bool ell_growth_holds = false;
  bool c_polynomial_positive = false;  // c^2 + 8c - 8 > 0
  double min_sigma2_over_log = 0.0;  // min sigma^2(t)/ln t
  bool sigma2_growth_holds = false;  // that minimum exceeds 8
  std::string note;
};

ConditionReport check_variance_conditions(const VarianceFunction& sigma2, const std::function<double(double)>& ell,
                                          double c, double t_lo, double t_hi);

}  // namespace pickands
