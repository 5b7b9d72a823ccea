#include "app.hpp"

#include "pickands/errors.hpp"
#include "pickands/levy.hpp"
#include "pickands/maxstable.hpp"
#include "pickands/stats.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

namespace pickands::cli {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---------------------------------------------------------------- parsing

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(path + key + ": missing required field");
  return j.at(key);
}

double number(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number()) throw ConfigError(path + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& j, const std::string& key, const std::string& path, double fallback) {
  return j.contains(key) ? number(j, key, path) : fallback;
}

std::vector<double> numbers_or_empty(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(path + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(path + key + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string text(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_string()) throw ConfigError(path + key + ": expected a string");
  return v.get<std::string>();
}

std::size_t count(const json& j, const std::string& key, const std::string& path, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(path + key + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

template <class F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

VarianceFunction parse_variance(const json& j, const std::string& path) {
  const std::string kind = text(j, "kind", path);
  if (kind == "power") {
    const double alpha = number(j, "alpha", path);
    const double scale = number(j, "scale", path);
    return with_path(path + "alpha", [&] { return VarianceFunction::power(alpha, scale); });
  }
  if (kind == "tabulated") {
    if (j.contains("file")) {
      const std::string file = text(j, "file", path);
      return with_path(path + "file", [&] { return load_tabulated_variance(file); });
    }
    auto t = numbers_or_empty(j, "t", path);
    auto v = numbers_or_empty(j, "sigma2", path);
    return with_path(path + "t", [&] { return VarianceFunction::tabulated(std::move(t), std::move(v)); });
  }
  throw ConfigError(path + "kind: unknown variance kind '" + kind + "' (power | tabulated)");
}

json variance_json(const VarianceFunction& f) {
  if (f.kind() == VarianceFunction::Kind::power) return {{"kind", "power"}, {"alpha", f.alpha()}, {"scale", f.scale()}};
  return {{"kind", "tabulated"}, {"t", f.table_t()}, {"sigma2", f.table_values()}};
}

ProcessSpec parse_process(const json& j) {
  const std::string path = "process.";
  const std::string kind = text(j, "kind", path);
  if (kind == "gaussian") return GaussianProcess{parse_variance(require(j, "variance", path), path + "variance.")};
  if (kind == "levy") {
    const std::string variant = text(j, "variant", path);
    LevySpec spec;
    if (variant == "brownian_drift") {
      spec = BrownianDrift{number(j, "mu", path), number(j, "sigma", path)};
    } else if (variant == "compound_poisson_exp") {
      spec = CompoundPoissonExp{number(j, "lambda", path), number(j, "rho", path),
                                static_cast<int>(number_or(j, "jump_sign", path, 1.0))};
    } else if (variant == "brownian_plus_negative_cp") {
      spec = BrownianPlusNegativeCP{number(j, "mu", path), number(j, "sigma", path), number(j, "lambda", path),
                                    number(j, "rho", path)};
    } else {
      throw ConfigError(path + "variant: unknown Levy variant '" + variant +
                        "' (brownian_drift | compound_poisson_exp | brownian_plus_negative_cp)");
    }
    with_path(path + "variant", [&] {
      validate(spec);
      return 0;
    });
    return LevyProcess{spec};
  }
  if (kind == "variance_mixed") {
    const json& mixing = require(j, "mixing", path);
    VarianceMixedProcess m{parse_variance(require(j, "variance", path), path + "variance."),
                           MixingLaw{numbers_or_empty(mixing, "values", path + "mixing."),
                                     numbers_or_empty(mixing, "probabilities", path + "mixing.")}};
    with_path(path + "mixing", [&] {
      default_window(m);
      return 0;
    });
    return m;
  }
  throw ConfigError(path + "kind: unknown process kind '" + kind + "' (gaussian | levy | variance_mixed)");
}

json process_json(const ProcessSpec& process) {
  return std::visit(
      overloaded{
          [](const GaussianProcess& g) -> json { return {{"kind", "gaussian"}, {"variance", variance_json(g.variance)}}; },
          [](const LevyProcess& l) -> json {
            return std::visit(overloaded{
                                  [](const BrownianDrift& b) -> json {
                                    return {{"kind", "levy"}, {"variant", "brownian_drift"}, {"mu", b.mu}, {"sigma", b.sigma}};
                                  },
                                  [](const CompoundPoissonExp& c) -> json {
                                    return {{"kind", "levy"},        {"variant", "compound_poisson_exp"},
                                            {"lambda", c.lambda},    {"rho", c.rho},
                                            {"jump_sign", c.jump_sign}};
                                  },
                                  [](const BrownianPlusNegativeCP& c) -> json {
                                    return {{"kind", "levy"},     {"variant", "brownian_plus_negative_cp"},
                                            {"mu", c.mu},         {"sigma", c.sigma},
                                            {"lambda", c.lambda}, {"rho", c.rho}};
                                  },
                              },
                              l.spec);
          },
          [](const VarianceMixedProcess& m) -> json {
            return {{"kind", "variance_mixed"},
                    {"variance", variance_json(m.variance)},
                    {"mixing", {{"values", m.mixing.values}, {"probabilities", m.mixing.probabilities}}}};
          },
      },
      process);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const std::set<std::string> kEstimateMethods = {"limit", "dieker_yakir", "grid_attainment", "capacity", "fekete"};

}  // namespace

// ---------------------------------------------------------------- config

GridSpec ExperimentConfig::resolved_grid() const {
  GridSpec g;
  g.delta = delta;
  g.eta = eta;
  g.target_delta = target_delta;
  if (window_lo && window_hi) {
    g.window_lo = *window_lo;
    g.window_hi = *window_hi;
  } else {
    const Window w = default_window(process);
    g.window_lo = window_lo.value_or(w.lo);
    g.window_hi = window_hi.value_or(w.hi);
  }
  return g;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig c;
  c.process = parse_process(require(j, "process", ""));
  const json& grid = require(j, "grid", "");
  c.delta = number(grid, "delta", "grid.");
  if (grid.contains("window_lo")) c.window_lo = number(grid, "window_lo", "grid.");
  if (grid.contains("window_hi")) c.window_hi = number(grid, "window_hi", "grid.");
  c.eta = number_or(grid, "eta", "grid.", 0.0);
  c.target_delta = number_or(grid, "target_delta", "grid.", 0.0);
  c.method = j.contains("method") ? text(j, "method", "") : "dieker_yakir";
  c.n = count(j, "n", "", c.n);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer()) throw ConfigError("seed: expected an integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  c.workers = static_cast<unsigned>(count(j, "workers", "", 1));
  if (j.contains("output")) c.output = text(j, "output", "");

  if (j.contains("extras")) {
    const json& e = j.at("extras");
    const std::string p = "extras.";
    if (e.contains("T")) c.extras.horizon = number(e, "T", p);
    c.extras.beta = number_or(e, "beta", p, c.extras.beta);
    c.extras.k_pilot = count(e, "k_pilot", p, c.extras.k_pilot);
    c.extras.fine_step = number_or(e, "fine_step", p, c.extras.fine_step);
    c.extras.x_probes = numbers_or_empty(e, "x_probes", p);
    c.extras.delta_list = numbers_or_empty(e, "delta_list", p);
    c.extras.horizons = numbers_or_empty(e, "horizons", p);
    c.extras.paths = count(e, "paths", p, c.extras.paths);
    if (e.contains("simulate")) c.extras.simulate = text(e, "simulate", p);
    if (c.extras.simulate != "w" && c.extras.simulate != "brown_resnick") {
      throw ConfigError("extras.simulate: expected 'w' or 'brown_resnick'");
    }
  }

  if (!(c.delta > 0.0)) throw ConfigError("grid.delta: must be positive");
  if (c.window_lo.has_value() != c.window_hi.has_value()) {
    throw ConfigError("grid.window_lo: window_lo and window_hi must be given together");
  }
  with_path("grid", [&] {
    GridSpec g{c.delta, c.window_lo.value_or(0.0), c.window_hi.value_or(0.0), c.eta, c.target_delta};
    g.validate();
    return 0;
  });
  if (c.workers == 0) throw ConfigError("workers: must be at least 1");
  return c;
}

json to_json(const ExperimentConfig& c) {
  json grid = {{"delta", c.delta}, {"eta", c.eta}, {"target_delta", c.target_delta}};
  if (c.window_lo) grid["window_lo"] = *c.window_lo;
  if (c.window_hi) grid["window_hi"] = *c.window_hi;
  json extras = {{"beta", c.extras.beta},         {"k_pilot", c.extras.k_pilot},
                 {"fine_step", c.extras.fine_step}, {"x_probes", c.extras.x_probes},
                 {"delta_list", c.extras.delta_list}, {"horizons", c.extras.horizons},
                 {"paths", c.extras.paths},       {"simulate", c.extras.simulate}};
  if (c.extras.horizon) extras["T"] = *c.extras.horizon;
  json j = {{"process", process_json(c.process)},
            {"grid", grid},
            {"method", c.method},
            {"n", c.n},
            {"workers", c.workers},
            {"output", c.output},
            {"extras", extras}};
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

std::vector<ExperimentConfig> load_config_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::vector<ExperimentConfig> out;
  if (j.is_object() && j.contains("configs")) {
    if (!j.at("configs").is_array()) throw ConfigError("configs: expected an array");
    std::size_t i = 0;
    for (const auto& item : j.at("configs")) {
      try {
        out.push_back(parse_config(item));
      } catch (const ConfigError& e) {
        throw ConfigError("configs[" + std::to_string(i) + "]." + e.what());
      }
      ++i;
    }
    return out;
  }
  out.push_back(parse_config(j));
  return out;
}

void check_moments(const ExperimentConfig& config) {
  const auto* levy = std::get_if<LevyProcess>(&config.process);
  if (!levy) return;
  const bool targets_continuous =
      config.target_delta == 0.0 && (config.method == "dieker_yakir" || config.method == "limit");
  if (!targets_continuous) return;
  const MomentRoute route = config.eta == 0.0 ? MomentRoute::continuous : MomentRoute::discrete;
  const MomentCheck check = check_moment_conditions(levy->spec, route);
  if (!check.ok) throw MomentConditionError("moment condition failed: " + check.message);
}

ExperimentConfig apply_overrides(ExperimentConfig config, const RunOverrides& o) {
  if (o.seed) config.seed = o.seed;
  if (o.workers) config.workers = *o.workers;
  if (o.output) config.output = *o.output;
  return config;
}

// ---------------------------------------------------------------- records

std::string csv_header() {
  return "method,process,delta,eta,window_lo,window_hi,n,seed,value,stderr,ci_lo,ci_hi,truncation_note";
}

std::string csv_row(const std::string& process, const EstimateResult& r) {
  std::ostringstream os;
  os << to_string(r.method) << ',' << csv_field(process) << ',' << format_double(r.delta) << ','
     << format_double(r.eta) << ',' << format_double(r.window_lo) << ',' << format_double(r.window_hi) << ',' << r.n
     << ',' << r.seed << ',' << format_double(r.value) << ',' << format_double(r.std_error) << ','
     << format_double(r.ci_lo) << ',' << format_double(r.ci_hi) << ',' << csv_field(r.truncation_note);
  return os.str();
}

json record_json(const std::string& process, const EstimateResult& r) {
  return {{"method", to_string(r.method)}, {"process", process},      {"delta", r.delta},
          {"eta", r.eta},                  {"window_lo", r.window_lo}, {"window_hi", r.window_hi},
          {"n", r.n},                      {"seed", r.seed},           {"value", r.value},
          {"stderr", r.std_error},         {"ci_lo", r.ci_lo},         {"ci_hi", r.ci_hi},
          {"truncation_note", r.truncation_note}};
}

void append_records(const std::string& path, const std::string& format, const std::string& process,
                    std::span<const EstimateResult> records) {
  if (path.empty()) return;
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw ConfigError("output: cannot open " + path);
  if (format == "jsonl") {
    for (const auto& r : records) out << record_json(process, r).dump() << '\n';
    return;
  }
  if (fresh) out << csv_header() << '\n';
  for (const auto& r : records) out << csv_row(process, r) << '\n';
}

// ---------------------------------------------------------------- commands

namespace {

MonteCarloOptions mc_options(const ExperimentConfig& c) {
  if (!c.seed) throw ConfigError("seed: a seed is mandatory (set it in the config or pass --seed)");
  return {c.n, *c.seed, c.workers};
}

void summarize(std::ostream& out, const std::string& process, const EstimateResult& r) {
  out << std::left << std::setw(16) << to_string(r.method) << " " << process << "  delta=" << r.delta
      << " eta=" << r.eta << "  value=" << std::setprecision(6) << r.value << " +/- " << r.std_error << "  (n=" << r.n
      << ")\n";
}

void require_finite(const std::vector<EstimateResult>& records) {
  for (const auto& r : records) {
    if (!std::isfinite(r.value) || !std::isfinite(r.std_error)) {
      throw ConfigurationError("estimator produced a non-finite value");
    }
  }
}

}  // namespace

RunOutcome run_estimate(const ExperimentConfig& config, std::ostream& out) {
  if (!kEstimateMethods.contains(config.method)) {
    throw ConfigError("method: unknown method '" + config.method +
                      "' (limit | dieker_yakir | grid_attainment | capacity | fekete)");
  }
  check_moments(config);
  const MonteCarloOptions opts = mc_options(config);
  const GridSpec grid = config.resolved_grid();
  RunOutcome outcome;
  if (config.method == "dieker_yakir") {
    outcome.records.push_back(estimate_dieker_yakir(config.process, grid, opts));
  } else if (config.method == "grid_attainment") {
    const double delta = config.target_delta > 0.0 ? config.target_delta : config.delta;
    outcome.records.push_back(estimate_grid_attainment(config.process, delta, {grid.window_lo, grid.window_hi}, opts));
  } else if (config.method == "limit") {
    if (!config.extras.horizon) throw ConfigError("extras.T: the limit method needs a horizon T");
    outcome.records.push_back(estimate_limit_definition(config.process, config.target_delta, *config.extras.horizon,
                                                        opts, config.delta));
  } else if (config.method == "capacity") {
    const double lo = config.window_lo.value_or(0.0);
    const double hi = config.window_hi.value_or(config.delta);
    outcome.records.push_back(capacity_functional(config.process, Subgrid{config.delta, lo, hi}, opts));
  } else if (config.method == "fekete") {
    if (config.extras.horizons.empty()) throw ConfigError("extras.horizons: the fekete method needs horizons");
    outcome.records = fekete_diagnostic(config.process, config.target_delta, config.extras.horizons, opts, config.delta);
  }
  require_finite(outcome.records);
  const std::string label = describe(config.process);
  for (const auto& r : outcome.records) summarize(out, label, r);
  return outcome;
}

RunOutcome run_sweep(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  if (config.extras.delta_list.empty()) throw ConfigError("extras.delta_list: sweep needs at least one delta");
  const MonteCarloOptions base = mc_options(config);
  if (const auto* levy = std::get_if<LevyProcess>(&config.process)) {
    const MomentCheck check = check_moment_conditions(levy->spec, MomentRoute::discrete);
    if (!check.ok) throw MomentConditionError("moment condition failed: " + check.message);
  }
  const GridSpec grid = config.resolved_grid();
  const std::string label = describe(config.process);
  RunOutcome outcome;
  std::vector<DeltaEstimate> dy, attainment;
  for (std::size_t k = 0; k < config.extras.delta_list.size(); ++k) {
    const double delta = config.extras.delta_list[k];
    MonteCarloOptions opts = base;
    opts.seed = derive_seed(*config.seed, 2 * k);
    const auto d = estimate_dieker_yakir(config.process, make_grid(delta, grid.window_lo, grid.window_hi, delta, delta), opts);
    opts.seed = derive_seed(*config.seed, 2 * k + 1);
    const auto a = estimate_grid_attainment(config.process, delta, {grid.window_lo, grid.window_hi}, opts);
    dy.push_back({delta, d});
    attainment.push_back({delta, a});
    outcome.records.push_back(d);
    outcome.records.push_back(a);
    summarize(out, label, d);
    summarize(out, label, a);
    out << "  equality check at delta=" << delta << ": z=" << combined_z(a, d) << "\n";
  }
  if (config.extras.delta_list.size() < 3) {
    err << "warning: extrapolation needs at least 3 deltas; emitting per-delta records only\n";
  } else {
    for (const auto* series : {&dy, &attainment}) {
      const Extrapolation ex = richardson_extrapolate(*series);
      outcome.records.push_back(ex.estimate);
      out << "extrapolated ";
      summarize(out, label, ex.estimate);
      out << "  fitted exponent p=" << ex.exponent << "\n";
    }
  }
  require_finite(outcome.records);
  return outcome;
}

// ---------------------------------------------------------------- validate

std::size_t ValidationReport::failures() const {
  std::size_t f = 0;
  for (const auto& r : rows) f += r.status == "fail" ? 1 : 0;
  return f;
}

ExperimentConfig anchor_brownian_config() {
  ExperimentConfig c;
  c.process = GaussianProcess{VarianceFunction::power(1.0, 2.0)};
  c.delta = 0.5;
  c.window_lo = -20.0;
  c.window_hi = 20.0;
  c.eta = 0.5;
  c.target_delta = 0.5;
  c.n = 20000;
  c.seed = 20240601;
  return c;
}

namespace {

CheckRow row(const std::string& config, const std::string& check, bool pass, double statistic, double threshold,
             const std::string& detail) {
  return {config, check, pass ? "pass" : "fail", statistic, threshold, detail};
}

void battery(const ExperimentConfig& config, std::size_t index, ValidationReport& report) {
  const std::string name = "#" + std::to_string(index) + " " + describe(config.process);
  const std::uint64_t seed = config.seed.value_or(1);
  const GridSpec grid = config.resolved_grid();
  const double delta = config.delta;
  const bool underpowered = config.n < kUnderpoweredBelow;

  // Exact pathwise checks run at any n.
  {
    const GridSpec g = make_grid(delta, grid.window_lo, grid.window_hi, delta, delta);
    const PathSampler sampler(config.process, g);
    std::size_t violations = 0, below_one = 0;
    for (std::size_t i = 0; i < config.n; ++i) {
      auto rng = replicate_stream(seed, i);
      const auto f = path_functionals(sampler.sample(rng), delta, delta);
      if ((f.m_delta / (f.s_eta / delta)) / delta > 1.0 / delta) ++violations;
      if (f.m_delta < 1.0) ++below_one;
    }
    report.rows.push_back(row(name, "pathwise M/S <= 1/delta", violations == 0, static_cast<double>(violations), 0.0,
                              "violations over " + std::to_string(config.n) + " replicates"));
    report.rows.push_back(row(name, "pathwise M >= 1", below_one == 0, static_cast<double>(below_one), 0.0,
                              "violations over " + std::to_string(config.n) + " replicates"));
  }

  const std::vector<std::string> statistical = {"normalization E e^W(t) = 1",  "tilt-shift t=+",
                                                "tilt-shift t=-",              "resolvent identity",
                                                "grid attainment = limit-free", "finite-set max-stable law",
                                                "fekete non-increasing",       "gumbel margins"};
  if (underpowered) {
    for (const auto& check : statistical) {
      report.rows.push_back({name, check, "underpowered", 0.0, 0.0,
                             "n=" + std::to_string(config.n) + " < " + std::to_string(kUnderpoweredBelow)});
    }
    return;
  }
  const MonteCarloOptions opts{config.n, seed, config.workers};

  {  // normalization one time unit either side of the origin
    const PathSampler sampler(config.process, grid);
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / grid.delta)));
    const std::size_t zero = grid.zero_offset();
    std::vector<std::size_t> probes;
    if (zero >= steps) probes.push_back(zero - steps);
    if (zero + steps < grid.size()) probes.push_back(zero + steps);
    for (std::size_t probe : probes) {
      std::vector<double> xs(config.n);
      for (std::size_t i = 0; i < config.n; ++i) {
        auto rng = replicate_stream(seed, i, StreamTag::paired);
        xs[i] = std::exp(sampler.sample(rng).values[static_cast<Eigen::Index>(probe)]);
      }
      const auto m = mean_with_error(xs);
      const double z = m.std_error > 0 ? (m.mean - 1.0) / m.std_error : 0.0;
      std::ostringstream detail;
      detail << "t=" << grid.time_at(probe) << " mean=" << m.mean;
      report.rows.push_back(row(name, "normalization E e^W(t) = 1", std::abs(z) <= 4.0, z, 4.0, detail.str()));
    }
  }
  const double shift = std::max(delta, std::round(1.0 / delta) * delta);
  const double half_width = std::min(20.0, 0.5 * std::min(-grid.window_lo, grid.window_hi));
  if (half_width >= shift) {
    for (double t : {shift, -shift}) {
      const auto res = tilt_shift_check(config.process, delta, half_width, t, {}, opts);
      report.rows.push_back(row(name, t > 0 ? "tilt-shift t=+" : "tilt-shift t=-", std::abs(res.z) <= 3.0, res.z, 3.0,
                                "lhs=" + std::to_string(res.lhs.value) + " rhs=" + std::to_string(res.rhs.value)));
    }
  }
  {
    const double horizon = std::max(delta, std::round(1.0 / delta) * delta);
    const auto res = resolvent_identity_check(config.process, delta, horizon, opts);
    report.rows.push_back(row(name, "resolvent identity", std::abs(res.z) <= 3.0, res.z, 3.0,
                              "lhs=" + std::to_string(res.lhs.value) + " rhs=" + std::to_string(res.rhs.value)));
  }
  {
    const auto dy = estimate_dieker_yakir(config.process, make_grid(delta, grid.window_lo, grid.window_hi, delta, delta), opts);
    MonteCarloOptions other = opts;
    other.seed = derive_seed(seed, 1, StreamTag::paired);
    const auto ga = estimate_grid_attainment(config.process, delta, {grid.window_lo, grid.window_hi}, other);
    const double z = combined_z(ga, dy);
    report.rows.push_back(row(name, "grid attainment = limit-free", std::abs(z) <= 3.0, z, 3.0,
                              "C=" + std::to_string(ga.value) + " DY=" + std::to_string(dy.value)));
  }
  {
    const std::vector<double> xs = config.extras.x_probes.empty() ? std::vector<double>{-1.0, 0.0, 1.0, 2.0}
                                                                  : config.extras.x_probes;
    BrownResnickOptions br;
    br.beta = config.extras.beta;
    br.k_pilot = config.extras.k_pilot;
    br.pilot_seed = derive_seed(seed, 0, StreamTag::pilot);
    const auto rep = validate_fidis(config.process, Subgrid{delta, 0.0, delta}, xs, config.n, config.n, br, opts);
    std::size_t used = 0, within = 0;
    std::ostringstream detail;
    for (const auto& p : rep.probes) {
      detail << "x=" << p.x << ":z=" << p.z << " ";
      if (p.excluded) continue;
      ++used;
      within += std::abs(p.z) <= 3.0 ? 1 : 0;
    }
    const double frac = used ? static_cast<double>(within) / static_cast<double>(used) : 0.0;
    report.rows.push_back(row(name, "finite-set max-stable law", used > 0 && frac >= 0.95, frac, 0.95, detail.str()));
  }
  {
    const std::vector<double> horizons = {2.0 * delta, 4.0 * delta, 8.0 * delta, 16.0 * delta};
    const auto res = fekete_diagnostic(config.process, delta, horizons, opts);
    bool ok = true;
    for (std::size_t i = 1; i < res.size(); ++i) ok = ok && res[i].value <= res[i - 1].value;
    report.rows.push_back(row(name, "fekete non-increasing", ok, res.back().value, res.front().value,
                              "value(16 delta) vs value(2 delta)"));
  }
  {
    BrownResnickOptions br;
    br.beta = config.extras.beta;
    br.k_pilot = config.extras.k_pilot;
    br.pilot_seed = derive_seed(seed, 1, StreamTag::pilot);
    const GridSpec g = make_grid(delta, -2.0 * delta, 2.0 * delta);
    const BrownResnickSampler sampler(config.process, g, br);
    const std::size_t n = std::min<std::size_t>(config.n, 10000);
    std::vector<double> at_zero;
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = replicate_stream(seed, i, StreamTag::mixing);
      const auto xi = sampler.sample(rng);
      if (xi.stopped_cleanly) at_zero.push_back(xi.values[static_cast<Eigen::Index>(g.zero_offset())]);
    }
    const auto ks = ks_test(at_zero, gumbel_cdf);
    report.rows.push_back(row(name, "gumbel margins", ks.p_value >= 0.001, ks.p_value, 0.001,
                              "KS D=" + std::to_string(ks.statistic) + " on " + std::to_string(at_zero.size()) +
                                  " clean samples"));
  }
  if (const auto* levy = std::get_if<LevyProcess>(&config.process)) {
    const auto cont = check_moment_conditions(levy->spec, MomentRoute::continuous);
    report.rows.push_back({name, "moment condition (continuous route)", "info", cont.ok ? 1.0 : 0.0, 1.0, cont.message});
    if (is_spectrally_negative(levy->spec)) {
      const auto cand = extremal_index_candidates(levy->spec);
      report.rows.push_back({name, "closed-form index candidates", "info", cand.compensated_prime_at_one,
                             cand.phi_prime_at_one, "Phi'(1)-Phi(1) vs Phi'(1)"});
    }
  }
}

}  // namespace

ValidationReport validate_suite(std::span<const ExperimentConfig> configs) {
  ValidationReport report;
  for (std::size_t i = 0; i < configs.size(); ++i) battery(configs[i], i, report);
  return report;
}

void print_report(const ValidationReport& report, std::ostream& out) {
  out << std::left << std::setw(14) << "status" << std::setw(36) << "check" << std::setw(14) << "statistic"
      << std::setw(12) << "threshold" << "config / detail\n";
  for (const auto& r : report.rows) {
    out << std::left << std::setw(14) << r.status << std::setw(36) << r.check << std::setw(14) << r.statistic
        << std::setw(12) << r.threshold << r.config << "  " << r.detail << "\n";
  }
  out << report.rows.size() << " checks, " << report.failures() << " failed\n";
}

// ---------------------------------------------------------------- simulate

int run_simulate(const ExperimentConfig& config, std::ostream& csv) {
  if (!config.seed) throw ConfigError("seed: a seed is mandatory (set it in the config or pass --seed)");
  const GridSpec grid = config.resolved_grid();
  if (config.extras.simulate == "w") {
    const PathSampler sampler(config.process, grid);
    csv << "replicate,t,value\n";
    for (std::size_t r = 0; r < config.extras.paths; ++r) {
      auto rng = replicate_stream(*config.seed, r);
      const SamplePath w = sampler.sample(rng);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        csv << r << ',' << format_double(grid.time_at(i)) << ',' << format_double(w.values[static_cast<Eigen::Index>(i)])
            << '\n';
      }
    }
    return kOk;
  }
  BrownResnickOptions br;
  br.beta = config.extras.beta;
  br.k_pilot = config.extras.k_pilot;
  br.pilot_seed = derive_seed(*config.seed, 0, StreamTag::pilot);
  const BrownResnickSampler sampler(config.process, grid, br);
  csv << "replicate,t,value,n_points_used,stopped_cleanly\n";
  for (std::size_t r = 0; r < config.extras.paths; ++r) {
    auto rng = replicate_stream(*config.seed, r);
    const MaxStablePath xi = sampler.sample(rng);
    if (!xi.stopped_cleanly) std::cerr << "warning: replicate " << r << " reached the Poisson point cap\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv << r << ',' << format_double(grid.time_at(i)) << ',' << format_double(xi.values[static_cast<Eigen::Index>(i)])
          << ',' << xi.n_points_used << ',' << (xi.stopped_cleanly ? 1 : 0) << '\n';
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- entry

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const MomentConditionError& e) {
    err << "error: " << e.what() << "\n";
    return kMomentFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigurationError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const ContractError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UnsupportedSpecError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Monte Carlo estimation of generalized Pickands constants"};
  app.require_subcommand(1);

  std::string config_path;
  RunOverrides overrides;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string output;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "experiment config (JSON)");
    if (config_required) opt->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads; never changes results")->check(CLI::PositiveNumber);
    sub->add_option("--output", output, "output file (records are appended)");
    sub->add_option("--format", overrides.format, "record format")->check(CLI::IsMember({"csv", "jsonl"}));
  };
  auto* estimate = app.add_subcommand("estimate", "run one estimator and append its records");
  auto* validate = app.add_subcommand("validate", "run the property battery on a config set");
  auto* sweep = app.add_subcommand("sweep", "per-delta estimates plus delta -> 0 extrapolation");
  auto* simulate = app.add_subcommand("simulate", "dump raw W or Brown-Resnick paths as CSV");
  add_common(estimate, true);
  add_common(validate, false);
  add_common(sweep, true);
  add_common(simulate, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  auto collect = [&](CLI::App* sub) {
    if (sub->count("--seed")) overrides.seed = seed;
    if (sub->count("--workers")) overrides.workers = workers;
    if (sub->count("--output")) overrides.output = output;
  };

  return guarded(
      [&]() -> int {
        if (estimate->parsed() || sweep->parsed()) {
          CLI::App* sub = estimate->parsed() ? estimate : sweep;
          collect(sub);
          auto configs = load_config_set(config_path);
          int status = kOk;
          for (auto& c : configs) {
            c = apply_overrides(c, overrides);
            const RunOutcome out = estimate->parsed() ? run_estimate(c, std::cout) : run_sweep(c, std::cout, std::cerr);
            append_records(c.output, overrides.format, describe(c.process), out.records);
            status = std::max(status, out.exit_code);
          }
          return status;
        }
        if (simulate->parsed()) {
          collect(simulate);
          auto configs = load_config_set(config_path);
          for (auto& c : configs) {
            c = apply_overrides(c, overrides);
            if (c.output.empty()) {
              run_simulate(c, std::cout);
            } else {
              std::ofstream out(c.output);
              if (!out) throw ConfigError("output: cannot open " + c.output);
              run_simulate(c, out);
            }
          }
          return kOk;
        }
        collect(validate);
        std::vector<ExperimentConfig> configs;
        if (config_path.empty()) {
          configs.push_back(anchor_brownian_config());
        } else {
          configs = load_config_set(config_path);
        }
        for (auto& c : configs) c = apply_overrides(c, overrides);
        const ValidationReport report = validate_suite(configs);
        print_report(report, std::cout);
        if (overrides.output) {
          std::ofstream out(*overrides.output, std::ios::app);
          for (const auto& r : report.rows) {
            out << csv_field(r.config) << ',' << csv_field(r.check) << ',' << r.status << ','
                << format_double(r.statistic) << ',' << format_double(r.threshold) << ',' << csv_field(r.detail)
                << '\n';
          }
        }
        return kOk;
      },
      std::cerr);
}

}  // namespace pickands::cli
