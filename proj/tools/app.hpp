#pragma once

#include "pickands/estimators.hpp"
#include "pickands/grid.hpp"
#include "pickands/process.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pickands::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kMomentFailure = 3,
  kNumericFailure = 4,
};

/// Config problem with the offending field in the message ("grid.delta: ...").
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Extras {
  std::optional<double> horizon;       // "T"
  double beta = 1e-4;
  std::size_t k_pilot = 10000;
  double fine_step = 0.01;
  std::vector<double> x_probes;
  std::vector<double> delta_list;
  std::vector<double> horizons;        // fekete doubling sequence
  std::size_t paths = 1;               // simulate
  std::string simulate = "w";          // "w" or "brown_resnick"

  friend bool operator==(const Extras&, const Extras&) = default;
};

struct ExperimentConfig {
  ProcessSpec process;
  double delta = 0.01;
  std::optional<double> window_lo;  // both absent: default truncation window
  std::optional<double> window_hi;
  double eta = 0.0;
  double target_delta = 0.0;
  std::string method = "dieker_yakir";
  std::size_t n = 10000;
  std::optional<std::uint64_t> seed;  // mandatory when running
  unsigned workers = 1;
  std::string output;
  Extras extras;

  /// Grid with the default window filled in when none was given.
  GridSpec resolved_grid() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

/// A file holding either one experiment or {"configs": [...]}.
std::vector<ExperimentConfig> load_config_set(const std::string& path);

/// Throws MomentConditionError when a Levy process does not meet the
/// moment requirement of a method aimed at the continuous constant.
void check_moments(const ExperimentConfig& config);

std::string csv_header();
std::string csv_row(const std::string& process, const EstimateResult& r);
nlohmann::json record_json(const std::string& process, const EstimateResult& r);

/// Appends records to `path` (header written only for a new or empty CSV).
void append_records(const std::string& path, const std::string& format, const std::string& process,
                    std::span<const EstimateResult> records);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> output;
  std::string format = "csv";
};

ExperimentConfig apply_overrides(ExperimentConfig config, const RunOverrides& overrides);

struct RunOutcome {
  int exit_code = kOk;
  std::vector<EstimateResult> records;
  std::string message;
};

RunOutcome run_estimate(const ExperimentConfig& config, std::ostream& out);
RunOutcome run_sweep(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

struct CheckRow {
  std::string config;
  std::string check;
  std::string status;  // pass | fail | underpowered | info
  double statistic = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckRow> rows;
  std::size_t failures() const;
};

inline constexpr std::size_t kUnderpoweredBelow = 1000;

ValidationReport validate_suite(std::span<const ExperimentConfig> configs);
void print_report(const ValidationReport& report, std::ostream& out);

/// The alpha = 1 anchor: sigma^2(t) = 2|t|.
ExperimentConfig anchor_brownian_config();

/// Raw path dump: replicate,t,value[,n_points_used,stopped_cleanly].
int run_simulate(const ExperimentConfig& config, std::ostream& csv);

/// Maps exceptions of a command to the stable exit codes.
int guarded(const std::function<int()>& body, std::ostream& err);

int main_entry(int argc, char** argv);

}  // namespace pickands::cli
