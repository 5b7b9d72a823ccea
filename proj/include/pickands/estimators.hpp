#pragma once

#include "pickands/grid.hpp"
#include "pickands/process.hpp"
#include "pickands/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pickands {

enum class Method { limit, dieker_yakir, grid_attainment, capacity };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct MonteCarloOptions {
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// A Monte Carlo estimate with its provenance.
struct EstimateResult {
  Method method = Method::dieker_yakir;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double ci_lo = 0.0;  // value -/+ 1.96 * std_error
  double ci_hi = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::string truncation_note;
  std::uint64_t seed = 0;
};

EstimateResult make_estimate(Method method, const MeanEstimate& mean, std::uint64_t seed);

/// z-score of a - b using the combined standard error sqrt(se_a^2 + se_b^2).
double combined_z(const EstimateResult& a, const EstimateResult& b);

/// Per-replicate quantities of the limit-free representation.
struct ReplicateFunctionals {
  double m_delta = 1.0;  // sup over the target_delta-subgrid of e^W
  double s_eta = 1.0;    // eta * sum over the eta-subgrid of e^W, or the trapezoid integral for eta = 0
  bool argmax_at_zero = true;  // every other point of the target_delta-subgrid has W <= 0
};

/// target_delta and eta (when > 0) must be multiples of the path's grid step;
/// target_delta = 0 takes the supremum over the whole fine grid.
ReplicateFunctionals path_functionals(const SamplePath& w, double target_delta, double eta);

/// Finite-horizon proxy (1/T) E sup_{t in delta Z, 0 <= t <= T} e^{W(t)}. It
/// is an upper bound of the constant in expectation (subadditivity).
/// delta = 0 samples on the grid `fine_step`. Refuses n < 100.
EstimateResult estimate_limit_definition(const ProcessSpec& process, double delta, double horizon,
                                         const MonteCarloOptions& opts, double fine_step = 0.01);

/// Mean of M^delta / S^eta over paths on `grid` (sampling step grid.delta,
/// supremum grid grid.target_delta, sum spacing grid.eta). The truncation note
/// carries the relative change when the inner half of the window is used.
EstimateResult estimate_dieker_yakir(const ProcessSpec& process, const GridSpec& grid, const MonteCarloOptions& opts);

/// (1/delta) P(sup_{t in delta Z} W(t) = 0) on the truncated window.
EstimateResult estimate_grid_attainment(const ProcessSpec& process, double delta, Window window,
                                        const MonteCarloOptions& opts);

/// Limit-definition estimates along doubling horizons from one set of paths
/// on [0, T_max]. Each horizon T averages the suprema of the T_max/T closed
/// blocks of length T, so value(2T) <= value(T) holds replicate by replicate.
std::vector<EstimateResult> fekete_diagnostic(const ProcessSpec& process, double delta,
                                              std::span<const double> horizons, const MonteCarloOptions& opts,
                                              double fine_step = 0.01);

enum class FunctionalKind {
  ratio_sup_sum,  // sup e^w / (delta * sum e^w) over the window
  argmax_in_set,  // 1{argmax of w lies in [set_lo, set_hi]}
  sup_value,      // sup e^w; not invariant under adding constants
};

struct ShiftFunctional {
  FunctionalKind kind = FunctionalKind::ratio_sup_sum;
  double set_lo = 0.0;
  double set_hi = 0.0;

  bool constant_invariant() const { return kind != FunctionalKind::sup_value; }
};

struct IdentityCheck {
  EstimateResult lhs;
  EstimateResult rhs;
  double z = 0.0;
};

/// lhs = E e^{W(t)} G(W), rhs = E G(W(. - t)), with G evaluated on the
/// lattice points of [-half_width, half_width]. Both sides use independent
/// replicates.
IdentityCheck tilt_shift_check(const ProcessSpec& process, double grid_step, double half_width, double t_shift,
                               const ShiftFunctional& functional, const MonteCarloOptions& opts);

/// lhs = (1/T) E sup_{[0,T]} e^W; rhs = (1/T) sum over lattice points u in
/// [0, T] of E[ sup / sum of e^W over delta Z cap [-u, T-u] ].
IdentityCheck resolvent_identity_check(const ProcessSpec& process, double delta, double horizon,
                                       const MonteCarloOptions& opts);

struct DeltaEstimate {
  double delta = 0.0;
  EstimateResult estimate;
};

struct Extrapolation {
  EstimateResult estimate;  // delta = 0
  double exponent = 1.0;
  double coefficient = 0.0;
};

/// Least-squares fit of value(delta) = H + a * delta^p with p in [0.5, 2];
/// returns H with the standard error propagated through the linear fit at
/// the fitted p. Needs >= 3 distinct deltas in geometric progression.
Extrapolation richardson_extrapolate(std::span<const DeltaEstimate> results);

}  // namespace pickands
