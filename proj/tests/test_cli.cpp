#include "app.hpp"

#include "pickands/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace pickands;
using namespace pickands::cli;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("pickands_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write(const std::string& path, const json& j) {
  std::ofstream(path) << j.dump(2);
  return path;
}

json anchor(double alpha = 1.0) {
  return {{"process", {{"kind", "gaussian"}, {"variance", {{"kind", "power"}, {"alpha", alpha}, {"scale", 2.0}}}}},
          {"grid", {{"delta", 0.5}, {"window_lo", -10.0}, {"window_hi", 10.0}, {"eta", 0.5}, {"target_delta", 0.5}}},
          {"method", "dieker_yakir"},
          {"n", 500},
          {"seed", 17}};
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "pickands");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::string> lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Config, RoundTripIdentity) {
  std::vector<json> samples = {anchor()};
  json levy = anchor();
  levy["process"] = {{"kind", "levy"}, {"variant", "brownian_plus_negative_cp"}, {"mu", 0.1}, {"sigma", 1.0},
                     {"lambda", 2.0},  {"rho", 1.5}};
  levy["extras"] = {{"T", 4.0}, {"x_probes", {-1, 0, 1}}, {"delta_list", {0.4, 0.2, 0.1}}, {"beta", 1e-5}};
  samples.push_back(levy);
  json mixed = anchor();
  mixed["process"] = {{"kind", "variance_mixed"},
                      {"variance", {{"kind", "tabulated"}, {"t", {0.0, 1.0, 20.0}}, {"sigma2", {0.0, 2.0, 40.0}}}},
                      {"mixing", {{"values", {0.5, 1.0}}, {"probabilities", {0.3, 0.7}}}}};
  mixed.erase("seed");
  samples.push_back(mixed);
  for (const auto& j : samples) {
    const ExperimentConfig c = parse_config(j);
    const json once = to_json(c);
    EXPECT_EQ(to_json(parse_config(once)), once);
    EXPECT_EQ(describe(parse_config(once).process), describe(c.process));
    EXPECT_EQ(parse_config(once).extras, c.extras);
  }
}

TEST(Config, FieldLevelErrors) {
  auto message_for = [](json j) -> std::string {
    try {
      parse_config(j);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  json j = anchor();
  j["grid"]["delta"] = -1.0;
  EXPECT_NE(message_for(j).find("grid.delta"), std::string::npos);
  j = anchor();
  j["grid"].erase("delta");
  EXPECT_NE(message_for(j).find("grid.delta"), std::string::npos);
  j = anchor();
  j["process"]["variance"]["alpha"] = 3.0;
  EXPECT_NE(message_for(j).find("process.variance"), std::string::npos);
  j = anchor();
  j["process"]["kind"] = "stable";
  EXPECT_NE(message_for(j).find("process.kind"), std::string::npos);
  j = anchor();
  j["grid"]["eta"] = 0.7;
  EXPECT_NE(message_for(j).find("grid"), std::string::npos);
  j = anchor();
  j["n"] = "many";
  EXPECT_NE(message_for(j).find("n:"), std::string::npos);
}

TEST(Records, CsvHeaderAndQuoting) {
  EXPECT_EQ(csv_header(), "method,process,delta,eta,window_lo,window_hi,n,seed,value,stderr,ci_lo,ci_hi,truncation_note");
  EstimateResult r;
  r.value = 0.5;
  r.truncation_note = "a, \"b\"";
  const std::string row = csv_row("gaussian:power(alpha=1;scale=2)", r);
  EXPECT_NE(row.find("\"a, \"\"b\"\"\""), std::string::npos);
  EXPECT_EQ(record_json("p", r)["stderr"], 0.0);
}

TEST(Cli, EstimateAppendsRecordsAndIsDeterministicAcrossWorkers) {
  TempDir dir;
  const std::string cfg = write(dir.file("c.json"), anchor());
  const std::string out = dir.file("out.csv");
  EXPECT_EQ(run({"estimate", "--config", cfg, "--output", out}), 0);
  EXPECT_EQ(run({"estimate", "--config", cfg, "--output", out, "--workers", "4"}), 0);
  const auto rows = lines(out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], csv_header());
  EXPECT_EQ(rows[1], rows[2]);

  const std::string jl = dir.file("out.jsonl");
  EXPECT_EQ(run({"estimate", "--config", cfg, "--output", jl, "--format", "jsonl", "--seed", "99"}), 0);
  const auto records = lines(jl);
  ASSERT_EQ(records.size(), 1u);
  const json rec = json::parse(records[0]);
  EXPECT_EQ(rec["seed"], 99);
  EXPECT_EQ(rec["method"], "dieker_yakir");
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  json no_seed = anchor();
  no_seed.erase("seed");
  EXPECT_EQ(run({"estimate", "--config", write(dir.file("a.json"), no_seed)}), kConfigError);
  EXPECT_EQ(run({"estimate", "--config", dir.file("missing.json")}), kConfigError);
  std::ofstream(dir.file("broken.json")) << "{ not json";
  EXPECT_EQ(run({"estimate", "--config", dir.file("broken.json")}), kConfigError);
  EXPECT_EQ(run({"estimate", "--config", write(dir.file("b.json"), anchor()), "--format", "xml"}), kConfigError);
  EXPECT_EQ(run({"frobnicate"}), kConfigError);

  json light = anchor();
  light["process"] = {{"kind", "levy"}, {"variant", "compound_poisson_exp"}, {"lambda", 1.0}, {"rho", 1.5},
                      {"jump_sign", 1}};
  light["grid"] = {{"delta", 0.05}, {"window_lo", -5.0}, {"window_hi", 5.0}, {"eta", 0.0}, {"target_delta", 0.0}};
  EXPECT_EQ(run({"estimate", "--config", write(dir.file("c.json"), light)}), kMomentFailure);

  json bad_method = anchor();
  bad_method["method"] = "magic";
  EXPECT_EQ(run({"estimate", "--config", write(dir.file("d.json"), bad_method)}), kConfigError);
}

TEST(Cli, SweepWithOneDeltaWarnsAndSkipsExtrapolation) {
  ExperimentConfig c = parse_config(anchor());
  c.extras.delta_list = {0.5};
  std::ostringstream out, err;
  const auto outcome = run_sweep(c, out, err);
  EXPECT_EQ(outcome.records.size(), 2u);
  EXPECT_NE(err.str().find("warning"), std::string::npos);
}

TEST(Cli, SweepExtrapolatesRankOneLine) {
  ExperimentConfig c = parse_config(anchor(2.0));
  c.window_lo = -8.0;
  c.window_hi = 8.0;
  c.delta = 0.1;
  c.eta = 0.1;
  c.target_delta = 0.1;
  c.n = 2000;
  c.extras.delta_list = {0.4, 0.2, 0.1};
  std::ostringstream out, err;
  const auto outcome = run_sweep(c, out, err);
  ASSERT_EQ(outcome.records.size(), 8u);
  EXPECT_NEAR(outcome.records[6].value, 0.5642, 0.02);
  EXPECT_EQ(outcome.records[6].delta, 0.0);
}

TEST(Cli, ValidateEmptySetAndUnderpowered) {
  TempDir dir;
  EXPECT_EQ(run({"validate", "--config", write(dir.file("empty.json"), {{"configs", json::array()}})}), 0);
  EXPECT_TRUE(validate_suite({}).rows.empty());

  ExperimentConfig c = parse_config(anchor());
  c.n = 10;
  const auto report = validate_suite(std::span<const ExperimentConfig>(&c, 1));
  std::size_t underpowered = 0;
  for (const auto& row : report.rows) {
    if (row.status == "underpowered") ++underpowered;
    if (row.check.find("pathwise") == std::string::npos) EXPECT_EQ(row.status, "underpowered") << row.check;
  }
  EXPECT_GT(underpowered, 0u);
  EXPECT_EQ(report.failures(), 0u);
}

TEST(Cli, SimulateWritesCsv) {
  TempDir dir;
  json j = anchor();
  j["extras"] = {{"paths", 2}, {"simulate", "brown_resnick"}, {"k_pilot", 500}};
  j["grid"]["window_lo"] = -1.0;
  j["grid"]["window_hi"] = 1.0;
  j["output"] = dir.file("paths.csv");
  EXPECT_EQ(run({"simulate", "--config", write(dir.file("s.json"), j)}), 0);
  const auto rows = lines(dir.file("paths.csv"));
  ASSERT_EQ(rows.size(), 1u + 2u * 5u);
  EXPECT_EQ(rows[0], "replicate,t,value,n_points_used,stopped_cleanly");
}

TEST(Cli, ShippedConfigsParseAndRoundTrip) {
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(PICKANDS_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++files;
    const auto configs = load_config_set(entry.path().string());
    ASSERT_FALSE(configs.empty()) << entry.path();
    for (const auto& c : configs) {
      EXPECT_TRUE(c.seed.has_value()) << entry.path();
      EXPECT_EQ(to_json(parse_config(to_json(c))), to_json(c)) << entry.path();
    }
  }
  EXPECT_GE(files, 4u);
}
