#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>

namespace pickands {

/// The lattice delta*Z clipped to [window_lo, window_hi].
///
/// `eta` is the spacing used for sums S^eta (0 selects the trapezoid
/// integral on the full grid) and `target_delta` the grid of the supremum
/// M^delta (0 means the continuous constant, approximated by `delta`).
struct GridSpec {
  double delta = 1.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double eta = 0.0;
  double target_delta = 0.0;

  /// Throws ContractError unless delta > 0, window_lo <= 0 <= window_hi and
  /// eta, target_delta are non-negative multiples of delta.
  void validate() const;

  std::int64_t first_index() const;
  std::int64_t last_index() const;
  std::size_t size() const;
  /// Position of t = 0 inside a values array.
  std::size_t zero_offset() const;
  double time_at(std::size_t i) const;
  /// Lattice index k (t = k*delta) of array position i.
  std::int64_t lattice_index(std::size_t i) const { return first_index() + static_cast<std::int64_t>(i); }
};

bool same_lattice(const GridSpec& a, const GridSpec& b);

/// Returns spacing/delta when it is a positive integer (relative tolerance
/// 1e-9), otherwise throws ContractError mentioning `what`.
std::int64_t lattice_stride(double spacing, double delta, const char* what);

/// Convenience constructor for a grid with window [lo, hi].
GridSpec make_grid(double delta, double lo, double hi, double eta = 0.0, double target_delta = 0.0);

/// One realization of a process on a grid; values are on the natural-log
/// scale and the value at t = 0 is exactly 0.
struct SamplePath {
  GridSpec grid;
  Eigen::VectorXd values;

  double at_zero() const { return values[static_cast<Eigen::Index>(grid.zero_offset())]; }
};

/// Restriction of a path to the lattice points in [lo, hi]; lo <= 0 <= hi.
SamplePath restrict_window(const SamplePath& path, double lo, double hi);

}  // namespace pickands
