#include "pickands/errors.hpp"
#include "pickands/estimators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pickands {

namespace {

constexpr double kMinExponent = 0.5;
constexpr double kMaxExponent = 2.0;

struct LinearFit {
  Eigen::Vector2d coef;
  Eigen::RowVectorXd intercept_weights;  // H = weights . values
  double residual = 0.0;
};

LinearFit fit_at(const Eigen::VectorXd& deltas, const Eigen::VectorXd& values, double p) {
  Eigen::MatrixXd design(deltas.size(), 2);
  design.col(0).setOnes();
  design.col(1) = deltas.array().pow(p).matrix();
  // Pseudo-inverse through the normal equations; two well-separated columns.
  const Eigen::Matrix2d gram = design.transpose() * design;
  const Eigen::MatrixXd pinv = gram.ldlt().solve(design.transpose());
  LinearFit fit;
  fit.coef = pinv * values;
  fit.intercept_weights = pinv.row(0);
  fit.residual = (design * fit.coef - values).squaredNorm();
  return fit;
}

}  // namespace

Extrapolation richardson_extrapolate(std::span<const DeltaEstimate> results) {
  if (results.size() < 3) throw ContractError("Richardson extrapolation needs at least 3 deltas");
  std::vector<DeltaEstimate> sorted(results.begin(), results.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.delta > b.delta; });
  for (const auto& r : sorted) {
    if (!(r.delta > 0.0)) throw ContractError("Richardson extrapolation needs positive deltas");
  }
  const double ratio = sorted[1].delta / sorted[0].delta;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double q = sorted[i].delta / sorted[i - 1].delta;
    if (!(q < 1.0) || std::abs(q - ratio) > 1e-9 * ratio) {
      throw ContractError("Richardson extrapolation needs distinct deltas in geometric progression");
    }
  }
  const auto m = static_cast<Eigen::Index>(sorted.size());
  Eigen::VectorXd deltas(m), values(m), errors(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    deltas[i] = sorted[static_cast<std::size_t>(i)].delta;
    values[i] = sorted[static_cast<std::size_t>(i)].estimate.value;
    errors[i] = sorted[static_cast<std::size_t>(i)].estimate.std_error;
  }

  // Coarse scan over p, then golden-section refinement around the best cell.
  constexpr int kScan = 300;
  double best_p = kMinExponent;
  double best_res = fit_at(deltas, values, best_p).residual;
  for (int i = 1; i <= kScan; ++i) {
    const double p = kMinExponent + (kMaxExponent - kMinExponent) * i / kScan;
    const double res = fit_at(deltas, values, p).residual;
    if (res < best_res) {
      best_res = res;
      best_p = p;
    }
  }
  const double cell = (kMaxExponent - kMinExponent) / kScan;
  double a = std::max(kMinExponent, best_p - cell);
  double b = std::min(kMaxExponent, best_p + cell);
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - golden * (b - a);
  double x2 = a + golden * (b - a);
  double f1 = fit_at(deltas, values, x1).residual;
  double f2 = fit_at(deltas, values, x2).residual;
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - golden * (b - a);
      f1 = fit_at(deltas, values, x1).residual;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + golden * (b - a);
      f2 = fit_at(deltas, values, x2).residual;
    }
  }
  const double refined = 0.5 * (a + b);
  const double p = fit_at(deltas, values, refined).residual <= best_res ? refined : best_p;
  const LinearFit fit = fit_at(deltas, values, p);

  Extrapolation out;
  out.exponent = p;
  out.coefficient = fit.coef[1];
  MeanEstimate mean;
  mean.mean = fit.coef[0];
  mean.std_error = std::sqrt((fit.intercept_weights.transpose().array().square() * errors.array().square()).sum());
  mean.n = sorted.front().estimate.n;
  out.estimate = make_estimate(sorted.front().estimate.method, mean, sorted.front().estimate.seed);
  out.estimate.delta = 0.0;
  out.estimate.eta = 0.0;
  out.estimate.window_lo = sorted.front().estimate.window_lo;
  out.estimate.window_hi = sorted.front().estimate.window_hi;
  std::ostringstream note;
  note << "richardson extrapolation over " << m << " deltas, fitted exponent p=" << p;
  out.estimate.truncation_note = note.str();
  return out;
}

}  // namespace pickands
