#include "pickands/maxstable.hpp"

#include "pickands/errors.hpp"
#include "pickands/parallel.hpp"
#include "pickands/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace pickands {

namespace {

constexpr double kMinProbability = 0.01;
constexpr double kMaxProbability = 0.99;

double pilot_quantile(const PathSampler& sampler, const BrownResnickOptions& opt) {
  if (!(opt.beta > 0.0 && opt.beta < 1.0)) throw ContractError("beta must lie in (0, 1)");
  if (opt.k_pilot == 0) throw ContractError("k_pilot must be positive");
  std::vector<double> sups(opt.k_pilot);
  for (std::size_t i = 0; i < opt.k_pilot; ++i) {
    auto rng = replicate_stream(opt.pilot_seed, i, StreamTag::pilot);
    sups[i] = sampler.sample(rng).values.maxCoeff();
  }
  const auto k = static_cast<std::size_t>(
      std::clamp(std::ceil((1.0 - opt.beta) * static_cast<double>(opt.k_pilot)) - 1.0, 0.0,
                 static_cast<double>(opt.k_pilot - 1)));
  std::nth_element(sups.begin(), sups.begin() + static_cast<std::ptrdiff_t>(k), sups.end());
  return sups[k];
}

GridSpec covering_grid(const Subgrid& set) {
  if (!(set.hi >= set.lo)) throw ContractError("empty point set: hi < lo");
  const GridSpec grid = make_grid(set.delta, std::min(set.lo, 0.0), std::max(set.hi, 0.0));
  return grid;
}

// Array positions of the lattice points inside [lo, hi].
std::pair<Eigen::Index, Eigen::Index> set_range(const GridSpec& grid, const Subgrid& set) {
  const auto first = static_cast<std::int64_t>(std::ceil(set.lo / set.delta - 1e-9));
  const auto last = static_cast<std::int64_t>(std::floor(set.hi / set.delta + 1e-9));
  if (last < first) throw ContractError("point set contains no lattice point");
  return {static_cast<Eigen::Index>(first - grid.first_index()), static_cast<Eigen::Index>(last - first + 1)};
}

double neg_log_se(double p, std::size_t n) {
  return std::sqrt((1.0 - p) / (static_cast<double>(n) * p));
}

}  // namespace

BrownResnickSampler::BrownResnickSampler(const ProcessSpec& process, const GridSpec& grid,
                                         const BrownResnickOptions& options)
    : sampler_(process, grid), options_(options) {
  threshold_ = pilot_quantile(sampler_, options_);
}

MaxStablePath BrownResnickSampler::sample(RandomStream& rng) const {
  const GridSpec& grid = sampler_.grid();
  MaxStablePath out;
  out.grid = grid;
  out.values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()),
                                         -std::numeric_limits<double>::infinity());
  out.truncation_bound = threshold_;
  std::exponential_distribution<double> arrival(1.0);
  double gamma = 0.0;
  for (;;) {
    gamma += arrival(rng);
    const double p = -std::log(gamma);
    if (out.n_points_used > 0 && p + threshold_ <= out.values.minCoeff()) {
      out.stopped_cleanly = true;
      break;
    }
    if (out.n_points_used >= options_.hard_cap) break;
    const SamplePath w = sampler_.sample(rng);
    out.values = out.values.cwiseMax((w.values.array() + p).matrix());
    ++out.n_points_used;
  }
  return out;
}

BrownResnickSampler::SupDraw BrownResnickSampler::sample_sup(RandomStream& rng) const {
  SupDraw out;
  out.value = -std::numeric_limits<double>::infinity();
  std::exponential_distribution<double> arrival(1.0);
  double gamma = 0.0;
  for (;;) {
    gamma += arrival(rng);
    const double p = -std::log(gamma);
    if (out.n_points_used > 0 && p + threshold_ <= out.value) {
      out.stopped_cleanly = true;
      break;
    }
    if (out.n_points_used >= options_.hard_cap) break;
    out.value = std::max(out.value, p + sampler_.sample(rng).values.maxCoeff());
    ++out.n_points_used;
  }
  return out;
}

MaxStablePath sample_brown_resnick(const ProcessSpec& process, const GridSpec& grid, double beta, std::size_t k_pilot,
                                   RandomStream& rng) {
  BrownResnickOptions opt;
  opt.beta = beta;
  opt.k_pilot = k_pilot;
  opt.pilot_seed = rng();
  return BrownResnickSampler(process, grid, opt).sample(rng);
}

EstimateResult capacity_functional(const ProcessSpec& process, const Subgrid& set, const MonteCarloOptions& opts) {
  if (opts.n < 2) throw ContractError("capacity functional needs at least two replicates");
  const GridSpec grid = covering_grid(set);
  const auto [offset, count] = set_range(grid, set);
  const PathSampler sampler(process, grid);
  const auto draws = run_replicates<double>(opts.n, opts.workers, [&](std::size_t i) {
    auto rng = replicate_stream(opts.seed, i, StreamTag::capacity);
    return std::exp(sampler.sample(rng).values.segment(offset, count).maxCoeff());
  });
  EstimateResult r = make_estimate(Method::capacity, mean_with_error(draws), opts.seed);
  r.delta = set.delta;
  r.eta = 0.0;
  r.window_lo = set.lo;
  r.window_hi = set.hi;
  r.truncation_note = "exact finite set, no truncation";
  return r;
}

FidisReport validate_fidis(const ProcessSpec& process, const Subgrid& set, std::span<const double> x_probes,
                           std::size_t n_xi, std::size_t n_cap, const BrownResnickOptions& br,
                           const MonteCarloOptions& opts) {
  if (n_xi == 0) throw ContractError("validate_fidis needs n_xi > 0");
  MonteCarloOptions cap_opts = opts;
  cap_opts.n = n_cap;
  FidisReport report;
  report.n_xi = n_xi;
  report.capacity = capacity_functional(process, set, cap_opts);

  const GridSpec grid = covering_grid(set);
  const auto [offset, count] = set_range(grid, set);
  const BrownResnickSampler sampler(process, grid, br);
  struct Draw {
    double sup = 0.0;
    bool clean = false;
  };
  const auto draws = run_replicates<Draw>(n_xi, opts.workers, [&](std::size_t i) {
    auto rng = replicate_stream(opts.seed, i);
    const MaxStablePath xi = sampler.sample(rng);
    return Draw{xi.values.segment(offset, count).maxCoeff(), xi.stopped_cleanly};
  });
  std::size_t clean = 0;
  for (const auto& d : draws) clean += d.clean ? 1 : 0;
  report.clean_fraction = static_cast<double>(clean) / static_cast<double>(n_xi);

  for (double x : x_probes) {
    FidisProbe probe;
    probe.x = x;
    std::size_t below = 0;
    for (const auto& d : draws) below += d.sup <= x ? 1 : 0;
    probe.p_hat = static_cast<double>(below) / static_cast<double>(n_xi);
    probe.rhs = report.capacity.value * std::exp(-x);
    probe.rhs_se = report.capacity.std_error * std::exp(-x);
    if (probe.p_hat < kMinProbability || probe.p_hat > kMaxProbability) {
      probe.excluded = true;
      probe.note = "excluded: empirical probability outside [0.01, 0.99]";
      probe.lhs = probe.p_hat > 0.0 ? -std::log(probe.p_hat) : std::numeric_limits<double>::infinity();
      probe.z = std::numeric_limits<double>::quiet_NaN();
    } else {
      probe.lhs = -std::log(probe.p_hat);
      probe.lhs_se = neg_log_se(probe.p_hat, n_xi);
      probe.z = (probe.lhs - probe.rhs) / std::hypot(probe.lhs_se, probe.rhs_se);
    }
    report.probes.push_back(probe);
  }
  return report;
}

BlockCheckReport extremal_index_block_check(const ProcessSpec& process, double delta, double horizon,
                                            std::span<const double> x_probes, const BrownResnickOptions& br,
                                            const MonteCarloOptions& opts, std::optional<EstimateResult> reference) {
  if (!(delta > 0.0)) throw ContractError("block check needs delta > 0");
  if (!(horizon >= delta)) throw ContractError("block check needs T >= delta");
  BlockCheckReport report;
  if (reference) {
    report.reference = *reference;
  } else {
    const Window w = default_window(process);
    report.reference = estimate_dieker_yakir(process, make_grid(delta, w.lo, w.hi, delta, delta), opts);
  }
  MonteCarloOptions cap_opts = opts;
  const Subgrid block{delta, 0.0, horizon};
  report.finite_horizon_capacity = capacity_functional(process, block, cap_opts);
  report.finite_horizon_capacity.value /= horizon;
  report.finite_horizon_capacity.std_error /= horizon;
  report.finite_horizon_capacity.ci_lo /= horizon;
  report.finite_horizon_capacity.ci_hi /= horizon;

  const BrownResnickSampler sampler(process, covering_grid(block), br);
  const auto draws = run_replicates<BrownResnickSampler::SupDraw>(opts.n, opts.workers, [&](std::size_t i) {
    auto rng = replicate_stream(opts.seed, i);
    return sampler.sample_sup(rng);
  });
  std::size_t clean = 0;
  for (const auto& d : draws) clean += d.stopped_cleanly ? 1 : 0;
  report.clean_fraction = static_cast<double>(clean) / static_cast<double>(opts.n);
  const double shift = std::log(horizon);
  for (double x : x_probes) {
    BlockProbe probe;
    probe.x = x;
    std::size_t below = 0;
    for (const auto& d : draws) below += d.value <= x + shift ? 1 : 0;
    probe.p_hat = static_cast<double>(below) / static_cast<double>(opts.n);
    if (probe.p_hat < kMinProbability || probe.p_hat > kMaxProbability) {
      probe.excluded = true;
      probe.note = "excluded: P(sup <= x + ln T) outside [0.01, 0.99]";
      probe.z_reference = probe.z_finite_horizon = std::numeric_limits<double>::quiet_NaN();
    } else {
      probe.index_estimate = -std::log(probe.p_hat) * std::exp(x);
      probe.index_se = neg_log_se(probe.p_hat, opts.n) * std::exp(x);
      probe.z_reference = (probe.index_estimate - report.reference.value) /
                          std::hypot(probe.index_se, report.reference.std_error);
      probe.z_finite_horizon = (probe.index_estimate - report.finite_horizon_capacity.value) /
                               std::hypot(probe.index_se, report.finite_horizon_capacity.std_error);
    }
    report.probes.push_back(probe);
  }
  std::ostringstream caveat;
  caveat << "finite T=" << horizon
         << ": the index estimate targets H(delta Z cap [0,T])/T, which exceeds the limit by O(1/T)";
  report.caveat = caveat.str();
  return report;
}

ShapeFunction ShapeFunction::quadratic() { return ShapeFunction{}; }

ShapeFunction ShapeFunction::absolute(double a) {
  if (!(a > 0.0)) throw ContractError("abs shape needs a > 0");
  ShapeFunction f;
  f.kind_ = Kind::abs;
  f.a_ = a;
  return f;
}

ShapeFunction ShapeFunction::tabulated(std::vector<double> t, std::vector<double> values) {
  if (t.size() != values.size() || t.size() < 2) throw ContractError("tabulated shape needs matching tables");
  bool has_zero = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0 && !(t[i] > t[i - 1])) throw ContractError("tabulated shape: t must be strictly increasing");
    if (values[i] > 0.0) throw ContractError("tabulated shape must satisfy sup F = F(0) = 0");
    if (t[i] == 0.0) {
      if (values[i] != 0.0) throw ContractError("tabulated shape must satisfy F(0) = 0");
      has_zero = true;
    }
  }
  if (!has_zero) throw ContractError("tabulated shape must contain t = 0");
  ShapeFunction f;
  f.kind_ = Kind::tabulated;
  f.t_ = std::move(t);
  f.f_ = std::move(values);
  return f;
}

double ShapeFunction::lo() const {
  return kind_ == Kind::tabulated ? t_.front() : -std::numeric_limits<double>::infinity();
}

double ShapeFunction::hi() const {
  return kind_ == Kind::tabulated ? t_.back() : std::numeric_limits<double>::infinity();
}

double ShapeFunction::operator()(double t) const {
  switch (kind_) {
    case Kind::quadratic: return -t * t;
    case Kind::abs: return -a_ * std::abs(t);
    case Kind::tabulated: {
      if (t < t_.front() || t > t_.back()) throw DomainError("shape function evaluated outside its table");
      const auto it = std::upper_bound(t_.begin(), t_.end(), t);
      if (it == t_.end()) return f_.back();
      const auto hi = static_cast<std::size_t>(it - t_.begin());
      const std::size_t lo = hi - 1;
      const double w = (t - t_[lo]) / (t_[hi] - t_[lo]);
      return f_[lo] + w * (f_[hi] - f_[lo]);
    }
  }
  return 0.0;
}

namespace {

double simpson(double fa, double fm, double fb, double a, double b) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 60);
}

}  // namespace

double m3_constant_deterministic(const ShapeFunction& shape, double delta, double quad_tol) {
  if (delta < 0.0) throw ContractError("delta must be non-negative");
  if (!(quad_tol > 0.0)) throw ContractError("quad_tol must be positive");
  const auto density = [&](double t) { return std::exp(shape(t)); };

  if (delta > 0.0) {
    double sum = 1.0;  // k = 0
    for (int side : {1, -1}) {
      for (std::int64_t k = 1;; ++k) {
        const double t = side * static_cast<double>(k) * delta;
        if (t < shape.lo() || t > shape.hi()) {
          throw DomainError("tabulated shape: tail not summable within the table");
        }
        const double term = density(t);
        sum += term;
        if (term < quad_tol * sum) break;
      }
    }
    return 1.0 / (delta * sum);
  }

  if (shape.kind() == ShapeFunction::Kind::tabulated) {
    const double total = integrate(density, shape.lo(), 0.0, quad_tol) + integrate(density, 0.0, shape.hi(), quad_tol);
    const double edge = std::max(density(shape.lo()), density(shape.hi()));
    if (edge > quad_tol * total) throw DomainError("tabulated shape: tail not summable within the table");
    return 1.0 / total;
  }
  // Symmetric doubling of the window until the added tails are negligible.
  double width = 1.0;
  double total = integrate(density, -width, 0.0, quad_tol) + integrate(density, 0.0, width, quad_tol);
  for (int it = 0; it < 64; ++it) {
    const double tail = integrate(density, width, 2.0 * width, quad_tol * total) +
                        integrate(density, -2.0 * width, -width, quad_tol * total);
    total += tail;
    width *= 2.0;
    if (tail < quad_tol * total) return 1.0 / total;
  }
  throw DomainError("shape function integral did not converge");
}

}  // namespace pickands
