#include "pickands/grid.hpp"

#include "pickands/errors.hpp"

#include <cmath>
#include <string>

namespace pickands {

namespace {
constexpr double kLatticeTol = 1e-9;
}

std::int64_t lattice_stride(double spacing, double delta, const char* what) {
  if (!(delta > 0.0)) throw ContractError("grid step must be positive");
  const double ratio = spacing / delta;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > kLatticeTol * std::max(1.0, ratio)) {
    throw ContractError(std::string(what) + " = " + std::to_string(spacing) +
                        " is not a positive integer multiple of the grid step " + std::to_string(delta) +
                        " (spacings must satisfy eta = k*delta)");
  }
  return static_cast<std::int64_t>(rounded);
}

void GridSpec::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ContractError("grid delta must be positive and finite");
  if (!(window_lo <= 0.0 && 0.0 <= window_hi)) throw ContractError("grid window must contain 0");
  if (!std::isfinite(window_lo) || !std::isfinite(window_hi)) throw ContractError("grid window must be finite");
  if (eta < 0.0) throw ContractError("eta must be non-negative");
  if (target_delta < 0.0) throw ContractError("target_delta must be non-negative");
  if (eta > 0.0) lattice_stride(eta, delta, "eta");
  if (target_delta > 0.0) lattice_stride(target_delta, delta, "target_delta");
}

std::int64_t GridSpec::first_index() const {
  return static_cast<std::int64_t>(std::ceil(window_lo / delta - kLatticeTol));
}

std::int64_t GridSpec::last_index() const {
  return static_cast<std::int64_t>(std::floor(window_hi / delta + kLatticeTol));
}

std::size_t GridSpec::size() const { return static_cast<std::size_t>(last_index() - first_index() + 1); }

std::size_t GridSpec::zero_offset() const { return static_cast<std::size_t>(-first_index()); }

double GridSpec::time_at(std::size_t i) const { return static_cast<double>(lattice_index(i)) * delta; }

bool same_lattice(const GridSpec& a, const GridSpec& b) {
  return a.delta == b.delta && a.first_index() == b.first_index() && a.last_index() == b.last_index();
}

GridSpec make_grid(double delta, double lo, double hi, double eta, double target_delta) {
  GridSpec g{delta, lo, hi, eta, target_delta};
  g.validate();
  return g;
}

SamplePath restrict_window(const SamplePath& path, double lo, double hi) {
  GridSpec sub = path.grid;
  sub.window_lo = lo;
  sub.window_hi = hi;
  sub.validate();
  if (sub.first_index() < path.grid.first_index() || sub.last_index() > path.grid.last_index()) {
    throw ContractError("restriction window exceeds the path's grid");
  }
  const auto offset = static_cast<Eigen::Index>(sub.first_index() - path.grid.first_index());
  return {sub, path.values.segment(offset, static_cast<Eigen::Index>(sub.size()))};
}

}  // namespace pickands
