#include "pickands/variance_function.hpp"

#include "pickands/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pickands {

VarianceFunction VarianceFunction::power(double alpha, double scale) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw ContractError("power variance requires alpha in (0, 2], got " + std::to_string(alpha));
  }
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw ContractError("power variance requires scale >= 0");
  VarianceFunction f;
  f.kind_ = Kind::power;
  f.alpha_ = alpha;
  f.scale_ = scale;
  return f;
}

VarianceFunction VarianceFunction::tabulated(std::vector<double> t, std::vector<double> sigma2) {
  if (t.size() != sigma2.size() || t.size() < 2) {
    throw ContractError("tabulated variance needs at least two (t, sigma2) pairs");
  }
  if (t.front() != 0.0 || sigma2.front() != 0.0) {
    throw ContractError("tabulated variance must start at (0, 0) since sigma2(0) = 0");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw ContractError("tabulated variance: t must be strictly increasing");
  }
  for (double v : sigma2) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ContractError("tabulated variance: values must be finite and >= 0");
  }
  VarianceFunction f;
  f.kind_ = Kind::tabulated;
  f.t_ = std::move(t);
  f.v_ = std::move(sigma2);
  return f;
}

double VarianceFunction::operator()(double t) const {
  const double x = std::abs(t);
  if (kind_ == Kind::power) return x == 0.0 ? 0.0 : scale_ * std::pow(x, alpha_);
  if (x > t_.back() * (1.0 + 1e-12)) {
    throw DomainError("tabulated variance evaluated at |t| = " + std::to_string(x) + " beyond table end " +
                      std::to_string(t_.back()));
  }
  const auto it = std::upper_bound(t_.begin(), t_.end(), x);
  if (it == t_.end()) return v_.back();
  const auto hi = static_cast<std::size_t>(it - t_.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - t_[lo]) / (t_[hi] - t_[lo]);
  return v_[lo] + w * (v_[hi] - v_[lo]);
}

std::string VarianceFunction::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::power) {
    os << "power(alpha=" << alpha_ << ";scale=" << scale_ << ")";
  } else {
    os << "tabulated(points=" << t_.size() << ";t_max=" << t_.back() << ")";
  }
  return os.str();
}

VarianceFunction load_tabulated_variance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open variance table " + path);
  std::vector<double> t, v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a)) continue;
    if (!(row >> b)) {
      throw ConfigurationError(path + ":" + std::to_string(line_no) + ": expected two columns");
    }
    t.push_back(a);
    v.push_back(b);
  }
  return VarianceFunction::tabulated(std::move(t), std::move(v));
}

double covariance_from_variogram(const VarianceFunction& sigma2, double s, double t) {
  return 0.5 * (sigma2(s) + sigma2(t) - sigma2(t - s));
}

}  // namespace pickands
