#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "erw/cli.hpp"
#include "erw/errors.hpp"

namespace erw::cli {
namespace {

using nlohmann::json;

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "erw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("erw_test_" + name);
  std::ofstream(path) << contents;
  return path;
}

// Splits CSV text into rows of cells, skipping '#' comment lines.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double num(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  EXPECT_EQ(used, s.size()) << s;
  return v;
}

TEST(ConfigParsing, Seeds) {
  EXPECT_EQ(parse_seed("42"), 42u);
  EXPECT_EQ(parse_seed("0x2A"), 42u);
  EXPECT_EQ(parse_seed("0xffffffffffffffff"), ~std::uint64_t{0});
  EXPECT_THROW(parse_seed("0x"), ConfigError);
  EXPECT_THROW(parse_seed("-1"), ConfigError);
  EXPECT_THROW(parse_seed("12abc"), ConfigError);
  EXPECT_THROW(parse_seed("0x1ffffffffffffffff"), ConfigError);
}

TEST(ConfigParsing, Lists) {
  EXPECT_EQ(parse_int_list("10, 100,1000"), (std::vector<std::int64_t>{10, 100, 1000}));
  EXPECT_THROW(parse_int_list("1,,2"), ConfigError);
  EXPECT_EQ(parse_alpha_list("0.6,0.7"), (std::vector<double>{0.6, 0.7}));
  const auto grid = parse_alpha_list("0.6:1.0:0.05");
  ASSERT_EQ(grid.size(), 9u);
  EXPECT_EQ(grid[3], 0.75);
  EXPECT_EQ(grid.back(), 1.0);
  EXPECT_THROW(parse_alpha_list("1:0:0.1"), ConfigError);
}

TEST(ConfigParsing, FullDocument) {
  const auto c = config_from_json(json::parse(R"({
    "distribution": {"kind": "bernoulli", "p": 0.3},
    "alpha": 0.6, "n_max": 500, "replicates": 20, "checkpoints": [10, 500],
    "master_seed": "0xdeadbeef", "threads": 2, "out": "x.csv",
    "alphas": {"start": 0.6, "stop": 0.7, "step": 0.05},
    "tolerances": {"marginal_z": 5.0},
    "verify": {"closed_form_alphas": [0.75], "n_max": 100, "suites": ["gamma_sums"]}
  })"));
  EXPECT_EQ(c.alpha, 0.6);
  EXPECT_EQ(c.n, 500);
  EXPECT_EQ(c.replicates, 20);
  EXPECT_EQ(c.master_seed, 0xdeadbeefu);
  EXPECT_EQ(c.threads, 2u);
  EXPECT_EQ(c.out, "x.csv");
  EXPECT_EQ(c.alphas, (std::vector<double>{0.6, 0.65, 0.7}));
  EXPECT_EQ(c.tolerances.marginal_z, 5.0);
  EXPECT_EQ(c.verify_n_max, 100);
  EXPECT_EQ(c.distribution().kind_name(), "bernoulli");
  EXPECT_EQ(config_from_json(json::parse(R"({"master_seed": 7})")).master_seed, 7u);
}

TEST(ConfigParsing, Rejections) {
  for (const char* bad : {R"({"alpah": 0.5})", R"({"alpha": 1.5})", R"({"replicates": 0})",
                          R"({"checkpoints": [5, 3]})", R"({"n": 0})", R"({"alpha": "x"})",
                          R"({"distribution": {"kind": "nope"}})", R"([1, 2])",
                          R"({"verify": {"bogus": 1}})", R"({"tolerances": {"nope": 1}})"}) {
    EXPECT_THROW(config_from_json(json::parse(bad)), ConfigError) << bad;
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}).code, kExitConfigError);
  EXPECT_EQ(run_cli({"bogus"}).code, kExitConfigError);
  EXPECT_EQ(run_cli({"limits", "--alpha"}).code, kExitConfigError);
  EXPECT_EQ(run_cli({"limits", "--alpha", "abc"}).code, kExitConfigError);
  EXPECT_EQ(run_cli({"limits", "--dist", "{not json"}).code, kExitConfigError);
  EXPECT_EQ(run_cli({"simulate", "--seed", "0xZZ"}).code, kExitConfigError);
  EXPECT_EQ(run_cli({"limits", "--config", "/nonexistent/cfg.json"}).code, kExitConfigError);
  EXPECT_EQ(run_cli({"exact", "--checkpoints", "5,2"}).code, kExitConfigError);
  EXPECT_EQ(run_cli({"limits", "--help"}).code, kExitOk);
}

TEST(Cli, LimitsOutput) {
  auto r = run_cli({"limits", "--alpha", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["q1"], 0.0);
  EXPECT_EQ(j["q2"], 1.0);
  EXPECT_EQ(j["q3"], 0.0);
  EXPECT_EQ(j["q4"], 1.0);
  EXPECT_EQ(j["alpha"], 1.0);
  EXPECT_EQ(j["distribution"]["kind"], "rademacher");

  r = run_cli({"limits", "--alpha", "0.75"});
  j = json::parse(r.out);
  EXPECT_NEAR(j["q2"].get<double>(), 2.256758, 1e-6);
  EXPECT_NEAR(j["q4"].get<double>(), 9.75, 1e-14);

  r = run_cli({"limits", "--alpha", "0.4", "--dist", R"({"kind":"uniform","lo":0,"hi":1})"});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("superdiffusive"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, FlagsOverrideConfig) {
  const auto cfg = temp_file("override.json",
                             R"({"alpha": 0.6, "distribution": {"kind": "bernoulli", "p": 0.3}})");
  auto j = json::parse(run_cli({"limits", "--config", cfg.string()}).out);
  EXPECT_EQ(j["alpha"], 0.6);
  EXPECT_EQ(j["distribution"]["kind"], "bernoulli");
  j = json::parse(run_cli({"limits", "--config", cfg.string(), "--alpha", "0.75", "--dist",
                           R"({"kind":"rademacher"})"})
                      .out);
  EXPECT_EQ(j["alpha"], 0.75);
  EXPECT_EQ(j["q4"], 9.75);
  std::filesystem::remove(cfg);
}

TEST(Cli, ExactTable) {
  auto rows = parse_csv(run_cli({"exact", "--n", "1", "--dist",
                                 R"({"kind":"bernoulli","p":0.3})"})
                            .out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "s2", "st", "s3", "su", "t2", "s2t", "s4"}));
  EXPECT_NEAR(num(rows[1][1]), 0.21, 1e-15);
  EXPECT_NEAR(num(rows[1][7]), 0.0777, 1e-15);

  rows = parse_csv(run_cli({"exact", "--alpha", "0.5", "--n", "3"}).out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(num(rows[1][1]), 1.0);
  EXPECT_EQ(num(rows[2][1]), 3.0);
  EXPECT_EQ(num(rows[3][1]), 5.5);
}

TEST(Cli, ExactCompareColumns) {
  const auto r = run_cli({"exact", "--alpha", "0.75", "--n", "10000", "--compare", "--dist",
                          R"({"kind":"uniform","lo":0,"hi":1})"});
  ASSERT_EQ(r.code, kExitOk);
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 10001u);
  ASSERT_EQ(rows[0].size(), 20u);
  EXPECT_EQ(rows[0][8], "s2_cf");
  EXPECT_EQ(rows[0][14], "s2_relerr");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (std::size_t k = 14; k < 20; ++k) {
      const double cf = std::fabs(num(rows[i][k - 6]));
      // Relative columns; values near zero fall back to absolute error.
      const double err = num(rows[i][k]);
      ASSERT_TRUE(err <= 1e-8 || err * std::max(cf, 1e-300) <= 1e-12) << rows[i][0];
    }
  }

  const auto singular = run_cli({"exact", "--alpha", "0.5", "--n", "3", "--compare"});
  EXPECT_EQ(singular.code, kExitOk);
  EXPECT_NE(singular.err.find("2*alpha-1"), std::string::npos);
  EXPECT_EQ(parse_csv(singular.out)[1][8], "nan");
}

TEST(Cli, SimulateIsByteIdenticalAcrossThreads) {
  const std::vector<std::string> base = {"simulate", "--alpha", "0.75", "--n", "300",
                                         "--replicates", "2000", "--seed", "0x2a",
                                         "--checkpoints", "10,300"};
  auto one = base, four = base;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  const auto a = run_cli(one), b = run_cli(four);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("master_seed=0x2a"), std::string::npos);

  const auto rows = parse_csv(a.out);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "p", "estimate", "stderr", "n_replicates",
                                               "exact", "limit", "z"}));
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (const auto& cell : rows[i]) (void)num(cell);
    EXPECT_LE(std::fabs(num(rows[i][7])), 4.0);
  }

  auto other_seed = base;
  other_seed[8] = "43";
  EXPECT_NE(run_cli(other_seed).out, a.out);
}

TEST(Cli, SimulateDegenerateWalk) {
  const auto rows = parse_csv(
      run_cli({"simulate", "--alpha", "1", "--n", "50", "--replicates", "100"}).out);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][1] == "2") {
      EXPECT_EQ(num(rows[i][2]), 1.0);
      EXPECT_EQ(num(rows[i][5]), 1.0);
    }
  }
}

TEST(Cli, OutFlagWritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "erw_test_out.csv";
  const auto r = run_cli({"exact", "--n", "4", "--out", path.string()});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), run_cli({"exact", "--n", "4"}).out);
  std::filesystem::remove(path);

  const auto bad = run_cli({"exact", "--n", "4", "--out", "/nonexistent/dir/x.csv"});
  EXPECT_EQ(bad.code, kExitConfigError);
  EXPECT_NE(bad.err.find("/nonexistent/dir/x.csv"), std::string::npos);
}

TEST(Cli, SweepRows) {
  const auto r = run_cli({"sweep", "--alphas", "0.4,0.5,0.6:1.0:0.05"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"dist_index", "kind", "alpha", "status", "q1",
                                               "q2", "q3", "q4", "k4"}));
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[1][3], "not_superdiffusive");
  EXPECT_EQ(rows[2][3], "singular");
  for (std::size_t i = 3; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][3], "ok");
    EXPECT_EQ(num(rows[i][6]), 0.0);
    EXPECT_EQ(num(rows[i][7]), num(rows[i][8]));
  }
  EXPECT_EQ(rows.back()[2], "1");
  EXPECT_EQ(num(rows.back()[5]), 1.0);
  EXPECT_EQ(num(rows.back()[7]), 1.0);

  const auto cfg = temp_file("sweep.json", R"({"distributions": [
      {"kind": "rademacher"}, {"kind": "bernoulli", "p": 0.3}], "alphas": [1.0]})");
  const auto two = parse_csv(run_cli({"sweep", "--config", cfg.string()}).out);
  ASSERT_EQ(two.size(), 3u);
  EXPECT_EQ(two[2][1], "bernoulli");
  EXPECT_NEAR(num(two[2][5]), 0.21, 1e-15);
  EXPECT_NEAR(num(two[2][6]), 0.084, 1e-15);
  EXPECT_NEAR(num(two[2][7]), 0.0777, 1e-15);
  std::filesystem::remove(cfg);
}

TEST(Cli, VerifyDefaultPasses) {
  const auto r = run_cli({"verify"});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["status"], "PASS");
  EXPECT_GE(j["suites"].size(), 10u);
  for (const auto& s : j["suites"]) {
    EXPECT_EQ(s["status"], "PASS") << s.dump();
    EXPECT_TRUE(s.contains("worst_error"));
  }
}

TEST(Cli, VerifySingularAlphaIsSkip) {
  const auto cfg = temp_file("skip.json", R"({"verify": {"closed_form_alphas": [0.5],
      "suites": ["closed_form_vs_recursion"]}})");
  const auto r = run_cli({"verify", "--config", cfg.string()});
  EXPECT_EQ(r.code, kExitOk);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["suites"][0]["status"], "SKIP");
  std::filesystem::remove(cfg);
}

TEST(Cli, VerifyTamperedFixtureFails) {
  const double p = 0.3;
  json fx = {{"m1", p}, {"m2", p}, {"m3", p}, {"m4", p},
             {"M2", 0.21}, {"M3", -0.084}, {"M4", 0.0777}, {"M12", 0.21},
             {"M13", 0.21}, {"M22", 0.21}, {"M112", 0.084}};
  const auto cfg = temp_file(
      "tamper.json",
      json{{"verify", {{"moment_fixture", fx}, {"suites", {"moment_identities"}}}}}.dump());
  const auto r = run_cli({"verify", "--config", cfg.string()});
  EXPECT_EQ(r.code, kExitVerifyFailed);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["status"], "FAIL");
  const auto& suite = j["suites"][0];
  EXPECT_EQ(suite["status"], "FAIL");
  EXPECT_NE(suite["failures"].dump().find("M12 - 2*m1*M2 = M3"), std::string::npos);
  std::filesystem::remove(cfg);
  EXPECT_EQ(run_cli({"verify", "--suite", "nope"}).code, kExitConfigError);
}

}  // namespace
}  // namespace erw::cli
