#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace pickands {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean and its standard error (sample variance with n-1), summed in
/// index order.
MeanEstimate mean_with_error(std::span<const double> xs);

double normal_cdf(double x);

/// Asymptotic Kolmogorov survival function Q(lambda) = P(K > lambda).
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test of `sample` against `cdf`.
KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test.
KsResult ks_test(std::span<const double> a, std::span<const double> b);

inline double gumbel_cdf(double x) {
  return std::exp(-std::exp(-x));
}

}  // namespace pickands
