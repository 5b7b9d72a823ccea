#include "pickands/process.hpp"

#include "pickands/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pickands {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kDriftStdRatio = 6.0;

void validate_mixing(const MixingLaw& law) {
  if (law.values.empty() || law.values.size() != law.probabilities.size()) {
    throw ContractError("mixing law needs matching, non-empty values and probabilities");
  }
  for (double v : law.values) {
    if (!(v > 0.0)) throw ContractError("mixing values must be > 0");
  }
  double total = 0.0;
  for (double p : law.probabilities) {
    if (!(p >= 0.0)) throw ContractError("mixing probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ContractError("mixing probabilities must sum to 1");
}

// Smallest L with sigma^2(L) >= threshold.
double gaussian_half_width(const VarianceFunction& f, double threshold) {
  if (f.kind() == VarianceFunction::Kind::power) {
    if (f.scale() <= 0.0) throw ContractError("degenerate variance function (scale 0) has no truncation window");
    return std::pow(threshold / f.scale(), 1.0 / f.alpha());
  }
  const auto& t = f.table_t();
  const auto& v = f.table_values();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (v[i] >= threshold) return t[i];
  }
  // Table too short for the rule; the span of a two-sided grid must stay in range.
  return 0.5 * t.back();
}

}  // namespace

std::string describe(const ProcessSpec& process) {
  return std::visit(overloaded{
                        [](const GaussianProcess& g) { return "gaussian:" + g.variance.describe(); },
                        [](const LevyProcess& l) { return describe(l.spec); },
                        [](const VarianceMixedProcess& m) {
                          std::ostringstream os;
                          os << "variance_mixed:" << m.variance.describe() << ":S{";
                          for (std::size_t i = 0; i < m.mixing.values.size(); ++i) {
                            os << (i ? ";" : "") << m.mixing.values[i] << "@" << m.mixing.probabilities[i];
                          }
                          os << "}";
                          return os.str();
                        },
                    },
                    process);
}

Window default_window(const ProcessSpec& process) {
  // Gaussian: sigma^2(L)/2 >= 6 sigma(L)  <=>  sigma^2(L) >= 144.
  const double gaussian_threshold = 4.0 * kDriftStdRatio * kDriftStdRatio;
  const double half = std::visit(
      overloaded{
          [&](const GaussianProcess& g) { return gaussian_half_width(g.variance, gaussian_threshold); },
          [&](const VarianceMixedProcess& m) {
            validate_mixing(m.mixing);
            const double s_min = *std::min_element(m.mixing.values.begin(), m.mixing.values.end());
            return gaussian_half_width(m.variance, gaussian_threshold / (s_min * s_min));
          },
          [&](const LevyProcess& l) {
            // |mean slope| * L >= 6 sqrt(variance slope * L) on both half-lines.
            const LevyTriplet plus = drift_compensate(l.spec);
            const LevyTriplet minus = tilt_negative_side(l.spec).law;
            double width = 0.0;
            for (const LevyTriplet* law : {&plus, &minus}) {
              const double mean = laplace_exponent_derivative(*law, 0.0, 1);
              const double var = laplace_exponent_derivative(*law, 0.0, 2);
              if (!(mean < 0.0)) throw ContractError("W does not drift to -infinity; no truncation window exists");
              width = std::max(width, kDriftStdRatio * kDriftStdRatio * var / (mean * mean));
            }
            return width;
          },
      },
      process);
  return {-half, half};
}

PathSampler::PathSampler(const ProcessSpec& process, const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  std::visit(overloaded{
                 [&](const GaussianProcess& g) { gaussian_.emplace(g.variance, grid_); },
                 [&](const LevyProcess& l) { levy_.emplace(l.spec, grid_); },
                 [&](const VarianceMixedProcess& m) {
                   validate_mixing(m.mixing);
                   gaussian_.emplace(m.variance, grid_);
                   mixing_ = m.mixing;
                 },
             },
             process);
  if (gaussian_) {
    half_variance_.resize(static_cast<Eigen::Index>(grid_.size()));
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      half_variance_[static_cast<Eigen::Index>(i)] = 0.5 * gaussian_->variance()(grid_.time_at(i));
    }
    half_variance_[static_cast<Eigen::Index>(grid_.zero_offset())] = 0.0;
  }
}

SamplePath PathSampler::sample(RandomStream& rng) const {
  if (levy_) return levy_->sample(rng);
  double s = 1.0;
  if (mixing_) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    s = mixing_->values.back();
    for (std::size_t i = 0; i < mixing_->values.size(); ++i) {
      acc += mixing_->probabilities[i];
      if (u < acc) {
        s = mixing_->values[i];
        break;
      }
    }
  }
  SamplePath path = gaussian_->sample(rng);
  path.values = s * path.values - (s * s) * half_variance_;
  return path;
}

std::vector<std::string> PathSampler::diagnostics() const {
  if (gaussian_) return gaussian_->diagnostics();
  return {};
}

}  // namespace pickands
