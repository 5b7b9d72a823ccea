#pragma once

#include <limits>
#include <string>
#include <vector>

namespace pickands {

/// Variance function sigma^2(t) = Var B(t) of a centered Gaussian process
/// with stationary increments and B(0) = 0. Evaluated at |t|.
///
/// The power kind scale*|t|^alpha with scale = 2 is the fractional Brownian
/// convention W(t) = sqrt(2) B_alpha(t) - |t|^alpha. The tabulated kind
/// interpolates linearly between (t_i, sigma^2(t_i)) and starts at (0, 0).
class VarianceFunction {
 public:
  enum class Kind { power, tabulated };

  static VarianceFunction power(double alpha, double scale);
  static VarianceFunction tabulated(std::vector<double> t, std::vector<double> sigma2);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double scale() const { return scale_; }
  const std::vector<double>& table_t() const { return t_; }
  const std::vector<double>& table_values() const { return v_; }

  /// sigma^2(|t|); throws DomainError outside the table range.
  double operator()(double t) const;

  /// Largest |t| at which the function can be evaluated.
  double max_argument() const {
    return kind_ == Kind::power ? std::numeric_limits<double>::infinity() : t_.back();
  }

  std::string describe() const;

  friend bool operator==(const VarianceFunction&, const VarianceFunction&) = default;

 private:
  Kind kind_ = Kind::power;
  double alpha_ = 1.0;
  double scale_ = 2.0;
  std::vector<double> t_;
  std::vector<double> v_;
};

/// Two-column text table (t, sigma^2(t)), whitespace separated, '#' starts a
/// comment.
VarianceFunction load_tabulated_variance(const std::string& path);

/// Cov(B(s), B(t)) = (sigma^2(s) + sigma^2(t) - sigma^2(t - s)) / 2.
double covariance_from_variogram(const VarianceFunction& sigma2, double s, double t);

}  // namespace pickands
