#include "pickands/gaussian.hpp"

#include "pickands/errors.hpp"

#include <Eigen/Cholesky>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace pickands {

namespace {

constexpr double kClipTolerance = 1e-10;
constexpr int kJitterDoublings = 3;

Eigen::Index next_power_of_two(Eigen::Index n) {
  Eigen::Index m = 1;
  while (m < n) m <<= 1;
  return m;
}

Eigen::FFT<double>& thread_fft() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace

GaussianPathSampler::GaussianPathSampler(VarianceFunction sigma2, GridSpec grid)
    : sigma2_(std::move(sigma2)), grid_(grid) {
  grid_.validate();
  const double span = grid_.time_at(grid_.size() - 1) - grid_.time_at(0);
  if (sigma2_.kind() == VarianceFunction::Kind::tabulated && span > sigma2_.max_argument() * (1.0 + 1e-12)) {
    throw DomainError("grid span " + std::to_string(span) + " exceeds the tabulated variance range");
  }
  if (grid_.size() == 1) return;
  if (sigma2_.kind() == VarianceFunction::Kind::power && try_circulant()) return;
  build_dense();
}

bool GaussianPathSampler::try_circulant() {
  const Eigen::Index increments = static_cast<Eigen::Index>(grid_.size()) - 1;
  const Eigen::Index m = next_power_of_two(increments);
  const Eigen::Index size = 2 * m;
  const double h = grid_.delta;
  // Autocovariance of the stationary increment sequence B((k+1)h) - B(kh).
  auto gamma = [&](Eigen::Index j) {
    const double jj = static_cast<double>(j);
    return 0.5 * (sigma2_((jj + 1.0) * h) + sigma2_((jj - 1.0) * h) - 2.0 * sigma2_(jj * h));
  };
  std::vector<std::complex<double>> row(static_cast<std::size_t>(size));
  for (Eigen::Index j = 0; j <= m; ++j) row[static_cast<std::size_t>(j)] = gamma(j);
  for (Eigen::Index j = m + 1; j < size; ++j) row[static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(size - j)];

  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, row);

  double max_eig = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& z : spectrum) {
    max_eig = std::max(max_eig, z.real());
    min_eig = std::min(min_eig, z.real());
  }
  if (min_eig < -kClipTolerance * max_eig) {
    std::ostringstream os;
    os << "circulant embedding has eigenvalue " << min_eig << " below -" << kClipTolerance
       << "*max; using dense factorization";
    diagnostics_.push_back(os.str());
    return false;
  }
  if (min_eig < 0.0) {
    std::ostringstream os;
    os << "clipped circulant eigenvalues down to " << min_eig << " to 0";
    diagnostics_.push_back(os.str());
  }
  sqrt_eigenvalues_.resize(size);
  const double inv_root = 1.0 / std::sqrt(static_cast<double>(size));
  for (Eigen::Index k = 0; k < size; ++k) {
    sqrt_eigenvalues_[k] = std::sqrt(std::max(0.0, spectrum[static_cast<std::size_t>(k)].real())) * inv_root;
  }
  embedding_size_ = size;
  circulant_ = true;
  return true;
}

void GaussianPathSampler::build_dense() {
  const auto n = static_cast<Eigen::Index>(grid_.size()) - 1;
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (i != grid_.zero_offset()) times.push_back(grid_.time_at(i));
  }
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      cov(i, j) = cov(j, i) =
          covariance_from_variogram(sigma2_, times[static_cast<std::size_t>(i)], times[static_cast<std::size_t>(j)]);
    }
  }
  double jitter = 1e-12 * cov.trace() / static_cast<double>(n);
  if (!(jitter > 0.0)) jitter = 1e-300;
  for (int attempt = 0; attempt <= kJitterDoublings; ++attempt, jitter *= 2.0) {
    Eigen::MatrixXd shifted = cov;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      factor_ = llt.matrixL();
      std::ostringstream os;
      os << "dense Cholesky factorization with diagonal jitter " << jitter;
      diagnostics_.push_back(os.str());
      return;
    }
  }
  throw ConfigurationError("covariance matrix is not positive semi-definite on the grid (Cholesky failed after jitter)");
}

void GaussianPathSampler::sample_circulant(RandomStream& rng, Eigen::Ref<Eigen::VectorXd> values) const {
  const Eigen::Index size = embedding_size_;
  const Eigen::Index half = size / 2;
  std::normal_distribution<double> normal;
  // Hermitian-symmetric weights make the transform real-valued.
  std::vector<std::complex<double>> weights(static_cast<std::size_t>(size));
  weights[0] = sqrt_eigenvalues_[0] * normal(rng);
  weights[static_cast<std::size_t>(half)] = sqrt_eigenvalues_[half] * normal(rng);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index k = 1; k < half; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    const std::complex<double> w = sqrt_eigenvalues_[k] * inv_sqrt2 * std::complex<double>(re, im);
    weights[static_cast<std::size_t>(k)] = w;
    weights[static_cast<std::size_t>(size - k)] = std::conj(w);
  }
  std::vector<std::complex<double>> increments;
  thread_fft().fwd(increments, weights);

  values[0] = 0.0;
  for (Eigen::Index i = 1; i < values.size(); ++i) values[i] = values[i - 1] + increments[static_cast<std::size_t>(i - 1)].real();
  values.array() -= values[static_cast<Eigen::Index>(grid_.zero_offset())];
}

void GaussianPathSampler::sample_dense(RandomStream& rng, Eigen::Ref<Eigen::VectorXd> values) const {
  const Eigen::Index n = factor_.rows();
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
  const Eigen::VectorXd x = factor_.triangularView<Eigen::Lower>() * z;
  const auto zero = static_cast<Eigen::Index>(grid_.zero_offset());
  values.head(zero) = x.head(zero);
  values[zero] = 0.0;
  values.tail(n - zero) = x.tail(n - zero);
}

SamplePath GaussianPathSampler::sample(RandomStream& rng) const {
  SamplePath path{grid_, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid_.size()))};
  if (grid_.size() == 1) return path;
  if (circulant_) {
    sample_circulant(rng, path.values);
  } else {
    sample_dense(rng, path.values);
  }
  return path;
}

SamplePath sample_gaussian_path(const VarianceFunction& sigma2, const GridSpec& grid, RandomStream& rng) {
  return GaussianPathSampler(sigma2, grid).sample(rng);
}

SamplePath drift_adjust_gaussian(const SamplePath& b, const VarianceFunction& sigma2) {
  return sample_variance_mixed(b, sigma2, 1.0);
}

SamplePath sample_variance_mixed(const SamplePath& b, const VarianceFunction& sigma2, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw ContractError("mixing value s must be positive");
  if (static_cast<std::size_t>(b.values.size()) != b.grid.size()) {
    throw ContractError("path length does not match its grid");
  }
  SamplePath w = b;
  const double s2 = s * s;
  const auto zero = static_cast<Eigen::Index>(b.grid.zero_offset());
  for (Eigen::Index i = 0; i < w.values.size(); ++i) {
    if (i == zero) continue;
    w.values[i] = s * b.values[i] - 0.5 * s2 * sigma2(b.grid.time_at(static_cast<std::size_t>(i)));
  }
  return w;
}

ConditionReport check_variance_conditions(const VarianceFunction& sigma2, const std::function<double(double)>& ell,
                                          double c, double t_lo, double t_hi) {
  if (!(c > 0.0 && c <= 1.0)) throw ContractError("c must lie in (0, 1]");
  if (!(t_lo > 1.0 && t_hi > t_lo) || !std::isfinite(t_hi)) {
    throw ContractError("t_range must be a finite interval with 1 < t_lo < t_hi");
  }
  ConditionReport r;
  const double poly = c * c + 8.0 * c - 8.0;
  r.c_polynomial_positive = poly > 0.0;
  r.ell_threshold = poly > 0.0 ? 8.0 / poly : std::numeric_limits<double>::infinity();
  r.sandwich_holds = true;
  r.min_ell_over_log = std::numeric_limits<double>::infinity();
  r.min_sigma2_over_log = std::numeric_limits<double>::infinity();
  constexpr int kProbes = 256;
  const double log_lo = std::log(t_lo);
  const double log_hi = std::log(t_hi);
  for (int i = 0; i < kProbes; ++i) {
    const double t = std::exp(log_lo + (log_hi - log_lo) * i / (kProbes - 1));
    const double s2 = sigma2(t);
    const double l = ell(t);
    if (c * l > s2 * (1.0 + 1e-12) || s2 > l * (1.0 + 1e-12)) r.sandwich_holds = false;
    r.min_ell_over_log = std::min(r.min_ell_over_log, l / std::log(t));
    r.min_sigma2_over_log = std::min(r.min_sigma2_over_log, s2 / std::log(t));
  }
  r.ell_growth_holds = r.c_polynomial_positive && r.min_ell_over_log > r.ell_threshold;
  r.sigma2_growth_holds = r.min_sigma2_over_log > 8.0;
  r.note = "heuristic: liminf conditions checked on a finite log-spaced range only";
  return r;
}

}  // namespace pickands
