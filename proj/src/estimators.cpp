#include "pickands/estimators.hpp"

#include "pickands/errors.hpp"
#include "pickands/parallel.hpp"
#include "pickands/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pickands {

namespace {

constexpr std::size_t kMinReplicates = 100;

void require_replicates(std::size_t n) {
  if (n < kMinReplicates) {
    throw ContractError("at least " + std::to_string(kMinReplicates) + " replicates are required, got " +
                        std::to_string(n));
  }
}

// Functionals on the lattice slice values[i] = W((first + i) * delta).
ReplicateFunctionals functionals_on(const double* values, std::int64_t count, std::int64_t first, double delta,
                                    std::int64_t sup_stride, std::int64_t sum_stride, double eta) {
  auto on_stride = [](std::int64_t k, std::int64_t stride) { return k % stride == 0; };
  double w_max = -std::numeric_limits<double>::infinity();
  bool zero_attains = true;
  for (std::int64_t i = 0; i < count; ++i) {
    const std::int64_t k = first + i;
    if (!on_stride(k, sup_stride)) continue;
    w_max = std::max(w_max, values[i]);
    if (k != 0 && values[i] > 0.0) zero_attains = false;
  }
  double sum = 0.0;
  if (eta > 0.0) {
    for (std::int64_t i = 0; i < count; ++i) {
      if (on_stride(first + i, sum_stride)) sum += std::exp(values[i]);
    }
    sum *= eta;
  } else {
    if (count < 2) throw ContractError("trapezoid integral (eta = 0) needs at least two grid points");
    for (std::int64_t i = 0; i < count; ++i) sum += std::exp(values[i]);
    sum -= 0.5 * (std::exp(values[0]) + std::exp(values[count - 1]));
    sum *= delta;
  }
  return {std::exp(w_max), sum, zero_attains};
}

std::int64_t stride_or_one(double spacing, double delta, const char* what) {
  return spacing > 0.0 ? lattice_stride(spacing, delta, what) : 1;
}

MeanEstimate mean_of(const std::vector<double>& xs) { return mean_with_error(xs); }

void set_window(EstimateResult& r, const GridSpec& g) {
  r.window_lo = g.time_at(0);
  r.window_hi = g.time_at(g.size() - 1);
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::limit: return "limit";
    case Method::dieker_yakir: return "dieker_yakir";
    case Method::grid_attainment: return "grid_attainment";
    case Method::capacity: return "capacity";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "limit") return Method::limit;
  if (name == "dieker_yakir") return Method::dieker_yakir;
  if (name == "grid_attainment") return Method::grid_attainment;
  if (name == "capacity") return Method::capacity;
  throw ContractError("unknown method '" + name + "'");
}

EstimateResult make_estimate(Method method, const MeanEstimate& mean, std::uint64_t seed) {
  EstimateResult r;
  r.method = method;
  r.value = mean.mean;
  r.std_error = mean.std_error;
  r.n = mean.n;
  r.ci_lo = r.value - 1.96 * r.std_error;
  r.ci_hi = r.value + 1.96 * r.std_error;
  r.seed = seed;
  return r;
}

double combined_z(const EstimateResult& a, const EstimateResult& b) {
  const double se = std::hypot(a.std_error, b.std_error);
  const double diff = a.value - b.value;
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  return diff / se;
}

ReplicateFunctionals path_functionals(const SamplePath& w, double target_delta, double eta) {
  const GridSpec& g = w.grid;
  if (static_cast<std::size_t>(w.values.size()) != g.size()) throw ContractError("path length does not match its grid");
  if (target_delta < 0.0 || eta < 0.0) throw ContractError("target_delta and eta must be non-negative");
  const std::int64_t sup_stride = stride_or_one(target_delta, g.delta, "target_delta");
  const std::int64_t sum_stride = stride_or_one(eta, g.delta, "eta");
  return functionals_on(w.values.data(), static_cast<std::int64_t>(g.size()), g.first_index(), g.delta, sup_stride,
                        sum_stride, eta);
}

EstimateResult estimate_limit_definition(const ProcessSpec& process, double delta, double horizon,
                                         const MonteCarloOptions& opts, double fine_step) {
  require_replicates(opts.n);
  if (!(horizon > 0.0)) throw ContractError("horizon T must be positive");
  if (delta < 0.0) throw ContractError("delta must be non-negative");
  const double step = delta > 0.0 ? delta : fine_step;
  if (!(step > 0.0)) throw ContractError("delta = 0 needs a positive fine_step");
  const GridSpec grid = make_grid(step, 0.0, horizon);
  const PathSampler sampler(process, grid);

  const auto draws = run_replicates<double>(opts.n, opts.workers, [&](std::size_t i) {
    auto rng = replicate_stream(opts.seed, i);
    const SamplePath w = sampler.sample(rng);
    return std::exp(w.values.maxCoeff()) / horizon;
  });
  EstimateResult r = make_estimate(Method::limit, mean_of(draws), opts.seed);
  r.delta = delta;
  set_window(r, grid);
  std::ostringstream note;
  note << "finite-horizon proxy T=" << horizon;
  if (delta == 0.0) note << " fine_step=" << step;
  r.truncation_note = note.str();
  return r;
}

EstimateResult estimate_dieker_yakir(const ProcessSpec& process, const GridSpec& grid, const MonteCarloOptions& opts) {
  require_replicates(opts.n);
  grid.validate();
  if (grid.target_delta > 0.0 && grid.eta == 0.0) {
    throw ContractError("inadmissible (delta, eta): for delta > 0 the sum spacing must be eta = k*delta, k >= 1");
  }
  const std::int64_t sup_stride = stride_or_one(grid.target_delta, grid.delta, "target_delta");
  const std::int64_t sum_stride = stride_or_one(grid.eta, grid.delta, "eta");
  if (grid.target_delta > 0.0) {
    lattice_stride(grid.eta, grid.target_delta, "eta (must be k*delta)");
  }
  const PathSampler sampler(process, grid);

  // Inner half-window, used for the truncation-sensitivity diagnostic.
  GridSpec inner = grid;
  inner.window_lo = 0.5 * grid.window_lo;
  inner.window_hi = 0.5 * grid.window_hi;
  const std::int64_t inner_offset = inner.first_index() - grid.first_index();
  const auto inner_count = static_cast<std::int64_t>(inner.size());

  struct Pair {
    double full = 0.0;
    double half = 0.0;
  };
  const auto draws = run_replicates<Pair>(opts.n, opts.workers, [&](std::size_t i) {
    auto rng = replicate_stream(opts.seed, i);
    const SamplePath w = sampler.sample(rng);
    const auto full = functionals_on(w.values.data(), static_cast<std::int64_t>(grid.size()), grid.first_index(),
                                     grid.delta, sup_stride, sum_stride, grid.eta);
    Pair p;
    p.full = full.m_delta / full.s_eta;
    if (inner_count >= 2 || grid.eta > 0.0) {
      const auto half = functionals_on(w.values.data() + inner_offset, inner_count, inner.first_index(), grid.delta,
                                       sup_stride, sum_stride, grid.eta);
      p.half = half.m_delta / half.s_eta;
    } else {
      p.half = p.full;
    }
    return p;
  });
  std::vector<double> full(draws.size()), half(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    full[i] = draws[i].full;
    half[i] = draws[i].half;
  }
  EstimateResult r = make_estimate(Method::dieker_yakir, mean_of(full), opts.seed);
  const double half_value = mean_of(half).mean;
  r.delta = grid.target_delta;
  r.eta = grid.eta;
  set_window(r, grid);
  std::ostringstream note;
  note << "grid_step=" << grid.delta << " half_window_value=" << half_value
       << " half_window_rel_change=" << std::abs(half_value - r.value) / r.value;
  r.truncation_note = note.str();
  return r;
}

EstimateResult estimate_grid_attainment(const ProcessSpec& process, double delta, Window window,
                                        const MonteCarloOptions& opts) {
  require_replicates(opts.n);
  if (!(delta > 0.0)) throw ContractError("grid attainment needs delta > 0 (the probability vanishes as delta -> 0)");
  const GridSpec grid = make_grid(delta, window.lo, window.hi, delta, delta);
  const PathSampler sampler(process, grid);
  const auto zero = static_cast<Eigen::Index>(grid.zero_offset());
  const auto draws = run_replicates<double>(opts.n, opts.workers, [&](std::size_t i) {
    auto rng = replicate_stream(opts.seed, i);
    const SamplePath w = sampler.sample(rng);
    for (Eigen::Index k = 0; k < w.values.size(); ++k) {
      if (k != zero && w.values[k] > 0.0) return 0.0;
    }
    return 1.0 / delta;
  });
  EstimateResult r = make_estimate(Method::grid_attainment, mean_of(draws), opts.seed);
  r.delta = delta;
  r.eta = delta;
  set_window(r, grid);
  r.truncation_note = "attainment of sup at t=0 on the truncated window";
  return r;
}

std::vector<EstimateResult> fekete_diagnostic(const ProcessSpec& process, double delta,
                                              std::span<const double> horizons, const MonteCarloOptions& opts,
                                              double fine_step) {
  require_replicates(opts.n);
  if (horizons.empty()) return {};
  for (std::size_t j = 1; j < horizons.size(); ++j) {
    if (std::abs(horizons[j] - 2.0 * horizons[j - 1]) > 1e-9 * horizons[j]) {
      throw ContractError("fekete_diagnostic needs a doubling sequence of horizons");
    }
  }
  const double step = delta > 0.0 ? delta : fine_step;
  const double t_max = horizons.back();
  const GridSpec grid = make_grid(step, 0.0, t_max);
  std::vector<std::int64_t> block_points;  // lattice points per block length
  for (double h : horizons) {
    if (h < step) {
      block_points.push_back(0);
    } else {
      block_points.push_back(lattice_stride(h, step, "horizon"));
    }
  }
  const PathSampler sampler(process, grid);
  const std::size_t levels = horizons.size();

  const auto draws = run_replicates<std::vector<double>>(opts.n, opts.workers, [&](std::size_t i) {
    auto rng = replicate_stream(opts.seed, i);
    const SamplePath w = sampler.sample(rng);
    std::vector<double> out(levels);
    for (std::size_t l = 0; l < levels; ++l) {
      const std::int64_t len = block_points[l];
      const double horizon = horizons[l];
      if (len == 0) {
        out[l] = 1.0 / horizon;
        continue;
      }
      const std::int64_t blocks = static_cast<std::int64_t>(grid.size() - 1) / len;
      double total = 0.0;
      for (std::int64_t b = 0; b < blocks; ++b) {
        // closed block [b*T, (b+1)*T]
        total += std::exp(w.values.segment(b * len, len + 1).maxCoeff());
      }
      out[l] = total / static_cast<double>(blocks) / horizon;
    }
    return out;
  });

  std::vector<EstimateResult> results;
  for (std::size_t l = 0; l < levels; ++l) {
    std::vector<double> xs(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) xs[i] = draws[i][l];
    EstimateResult r = make_estimate(Method::limit, mean_of(xs), opts.seed);
    r.delta = delta;
    r.window_lo = 0.0;
    r.window_hi = horizons[l];
    std::ostringstream note;
    note << "finite-horizon proxy T=" << horizons[l] << " averaged over " << (t_max / horizons[l])
         << " blocks (common random numbers)";
    r.truncation_note = note.str();
    results.push_back(std::move(r));
  }
  return results;
}

namespace {

double evaluate_functional(const ShiftFunctional& f, const double* w, std::int64_t count, double first_time,
                           double delta) {
  std::int64_t arg = 0;
  for (std::int64_t i = 1; i < count; ++i) {
    if (w[i] > w[arg]) arg = i;
  }
  const double w_max = w[arg];
  switch (f.kind) {
    case FunctionalKind::ratio_sup_sum: {
      double sum = 0.0;
      for (std::int64_t i = 0; i < count; ++i) sum += std::exp(w[i] - w_max);
      return 1.0 / (delta * sum);
    }
    case FunctionalKind::argmax_in_set: {
      const double t = first_time + static_cast<double>(arg) * delta;
      return (t >= f.set_lo - 1e-9 * delta && t <= f.set_hi + 1e-9 * delta) ? 1.0 : 0.0;
    }
    case FunctionalKind::sup_value:
      return std::exp(w_max);
  }
  return 0.0;
}

}  // namespace

IdentityCheck tilt_shift_check(const ProcessSpec& process, double grid_step, double half_width, double t_shift,
                               const ShiftFunctional& functional, const MonteCarloOptions& opts) {
  require_replicates(opts.n);
  if (!functional.constant_invariant()) {
    throw ContractError("tilt-shift identity needs a functional invariant under adding constants");
  }
  if (!(half_width > 0.0)) throw ContractError("half_width must be positive");
  const std::int64_t shift_steps =
      t_shift == 0.0 ? 0 : (t_shift > 0 ? 1 : -1) * lattice_stride(std::abs(t_shift), grid_step, "t_shift");
  if (std::abs(t_shift) > half_width) throw ContractError("|t_shift| must not exceed half_width");
  const std::int64_t half_points = static_cast<std::int64_t>(std::floor(half_width / grid_step + 1e-9));
  const double reach = static_cast<double>(half_points + std::abs(shift_steps)) * grid_step;
  const GridSpec grid = make_grid(grid_step, -reach, reach);
  const PathSampler sampler(process, grid);
  const std::int64_t zero = static_cast<std::int64_t>(grid.zero_offset());
  const std::int64_t count = 2 * half_points + 1;

  // lhs: e^{W(t)} G(W on [-L, L]).
  const auto lhs = run_replicates<double>(opts.n, opts.workers, [&](std::size_t i) {
    auto rng = replicate_stream(opts.seed, i);
    const SamplePath w = sampler.sample(rng);
    const double* base = w.values.data() + (zero - half_points);
    const double g = evaluate_functional(functional, base, count, -static_cast<double>(half_points) * grid_step, grid_step);
    return std::exp(w.values[zero + shift_steps]) * g;
  });
  // rhs: G(s -> W(s - t) on [-L, L]) = G(W on [-L - t, L - t]) in shifted time.
  const auto rhs = run_replicates<double>(opts.n, opts.workers, [&](std::size_t i) {
    auto rng = replicate_stream(opts.seed, i, StreamTag::paired);
    const SamplePath w = sampler.sample(rng);
    const double* base = w.values.data() + (zero - half_points - shift_steps);
    return evaluate_functional(functional, base, count, -static_cast<double>(half_points) * grid_step, grid_step);
  });

  IdentityCheck out;
  out.lhs = make_estimate(Method::dieker_yakir, mean_of(lhs), opts.seed);
  out.rhs = make_estimate(Method::dieker_yakir, mean_of(rhs), opts.seed);
  for (auto* side : {&out.lhs, &out.rhs}) {
    side->delta = grid_step;
    side->eta = grid_step;
    side->window_lo = -half_width;
    side->window_hi = half_width;
    side->truncation_note = "tilt-shift t=" + std::to_string(t_shift);
  }
  out.z = combined_z(out.lhs, out.rhs);
  return out;
}

IdentityCheck resolvent_identity_check(const ProcessSpec& process, double delta, double horizon,
                                       const MonteCarloOptions& opts) {
  if (!(delta > 0.0)) throw ContractError("resolvent identity check needs delta > 0");
  IdentityCheck out;
  out.lhs = estimate_limit_definition(process, delta, horizon, opts);

  const std::int64_t steps = static_cast<std::int64_t>(std::floor(horizon / delta + 1e-9));
  const double reach = static_cast<double>(steps) * delta;
  const GridSpec grid = make_grid(delta, -reach, reach);
  const PathSampler sampler(process, grid);
  const std::int64_t zero = static_cast<std::int64_t>(grid.zero_offset());
  const auto rhs = run_replicates<double>(opts.n, opts.workers, [&](std::size_t i) {
    auto rng = replicate_stream(opts.seed, i, StreamTag::paired);
    const SamplePath w = sampler.sample(rng);
    double total = 0.0;
    for (std::int64_t j = 0; j <= steps; ++j) {
      // window delta Z cap [-j delta, T - j delta] = indices zero-j .. zero-j+steps
      const auto seg = w.values.segment(zero - j, steps + 1);
      const double w_max = seg.maxCoeff();
      total += 1.0 / (seg.array() - w_max).exp().sum();
    }
    return total / horizon;
  });
  out.rhs = make_estimate(Method::limit, mean_of(rhs), opts.seed);
  out.rhs.delta = delta;
  out.rhs.eta = delta;
  out.rhs.window_lo = -reach;
  out.rhs.window_hi = reach;
  out.rhs.truncation_note = "shift-averaged ratio representation T=" + std::to_string(horizon);
  out.z = combined_z(out.lhs, out.rhs);
  return out;
}

}  // namespace pickands
