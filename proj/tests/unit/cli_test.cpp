#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nimbus/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result nimbus_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nimbus");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = nimbus::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("nimbus_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  fs::path root_;
};

}  // namespace

TEST_F(CliTest, RunWritesTablesAndFiles) {
  const auto r = nimbus_cli({"run", "--scenario", "step1", "--balancer", "rr", "--seed", "0", "--out", root_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* ub : {"UB1", "UB2", "UB3", "UB4"}) EXPECT_NE(r.out.find(ub), std::string::npos);
  EXPECT_TRUE(fs::exists(root_ / "step1__rr__closest__seed0" / "report.json"));
}

TEST_F(CliTest, RepeatedRunsByteIdentical) {
  const auto a = root_ / "a", b = root_ / "b";
  ASSERT_EQ(nimbus_cli({"run", "--scenario", "step3", "--broker", "optimize", "--out", a.string()}).code, 0);
  ASSERT_EQ(nimbus_cli({"run", "--scenario", "step3", "--broker", "optimize", "--out", b.string()}).code, 0);
  const auto dir = "step3__rr__optimize__seed0";
  EXPECT_EQ(slurp(a / dir / "report.json"), slurp(b / dir / "report.json"));
  EXPECT_FALSE(slurp(a / dir / "report.json").empty());
}

TEST_F(CliTest, Replications) {
  ASSERT_EQ(nimbus_cli({"run", "--scenario", "step1", "--seed", "5", "--replications", "2", "--out", root_.string()})
                .code,
            0);
  EXPECT_TRUE(fs::exists(root_ / "step1__rr__closest__seed5"));
  EXPECT_TRUE(fs::exists(root_ / "step1__rr__closest__seed6"));
}

TEST_F(CliTest, UnknownBalancerIsUsageError) {
  const auto r = nimbus_cli({"run", "--scenario", "step1", "--balancer", "fastest"});
  EXPECT_EQ(r.code, 1);
  for (const char* name : {"rr", "esce", "throttled"}) EXPECT_NE(r.err.find(name), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownScenarioIsUsageError) {
  const auto r = nimbus_cli({"run", "--scenario", "step9", "--out", root_.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("step9"), std::string::npos);
}

TEST_F(CliTest, InvalidScenarioFileIsUsageError) {
  fs::create_directories(root_);
  const auto file = root_ / "bad.json";
  std::ofstream(file) << R"({"user_bases": [{"name": "U", "region": 7}], "data_centers": [{"name": "D", "region": 0}]})";
  const auto r = nimbus_cli({"run", "--scenario", file.string(), "--out", root_.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("region out of range"), std::string::npos) << r.err;
}

TEST_F(CliTest, ScenarioFileRuns) {
  fs::create_directories(root_);
  const auto file = root_ / "mine.json";
  std::ofstream(file) << R"({"duration_hours": 2, "user_bases": [{"name": "U", "region": 4}],
                             "data_centers": [{"name": "D", "region": 4, "vm_count": 10}]})";
  const auto r = nimbus_cli({"run", "--scenario", file.string(), "--out", root_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(root_ / "mine__rr__closest__seed0" / "report.json"));
}

TEST_F(CliTest, MissingSubcommandIsUsageError) { EXPECT_EQ(nimbus_cli({}).code, 1); }

TEST_F(CliTest, ScenariosListing) {
  const auto r = nimbus_cli({"scenarios"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("step1\t1 DC / 100 VMs"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("step3\t4 DCs / 25 VMs"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("step2-cost"), std::string::npos);
}

TEST_F(CliTest, CompareMatrix) {
  const auto r = nimbus_cli({"compare", "--scenario", "step1", "--out", root_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(root_ / "comparison.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  for (const char* b : {"rr", "esce", "throttled"}) {
    EXPECT_TRUE(fs::exists(root_ / (std::string("step1__") + b + "__closest__seed0" ) / "report.json")) << b;
  }
}

TEST_F(CliTest, CompareNeedsScenario) {
  EXPECT_EQ(nimbus_cli({"compare", "--out", root_.string()}).code, 1);
}

TEST_F(CliTest, CompareRejectsBadSeedRange) {
  EXPECT_EQ(nimbus_cli({"compare", "--scenario", "step1", "--seeds", "5..2", "--out", root_.string()}).code, 1);
}

TEST_F(CliTest, CompareCellEqualsRun) {
  const auto a = root_ / "cmp", b = root_ / "run";
  ASSERT_EQ(nimbus_cli({"compare", "--scenario", "step2", "--balancer", "throttled", "--seed", "2", "--out", a.string()})
                .code,
            0);
  ASSERT_EQ(nimbus_cli({"run", "--scenario", "step2", "--balancer", "throttled", "--seed", "2", "--out", b.string()})
                .code,
            0);
  const auto dir = "step2__throttled__closest__seed2";
  EXPECT_EQ(slurp(a / dir / "report.json"), slurp(b / dir / "report.json"));
}

TEST_F(CliTest, AccrualFlagAddsCosts) {
  ASSERT_EQ(nimbus_cli({"run", "--scenario", "step1", "--accrue-memory-storage-costs", "--out", root_.string()}).code,
            0);
  const auto costs = slurp(root_ / "step1__rr__closest__seed0" / "costs.csv");
  // 0.05 per second over 24 h
  EXPECT_NE(costs.find(",4320,"), std::string::npos) << costs;
}

TEST_F(CliTest, OutputRootFromEnvironment) {
  ::setenv("NIMBUS_OUT", root_.string().c_str(), 1);
  EXPECT_EQ(nimbus::cli::output_root(""), root_);
  EXPECT_EQ(nimbus::cli::output_root("elsewhere"), fs::path("elsewhere"));
  ::unsetenv("NIMBUS_OUT");
  EXPECT_EQ(nimbus::cli::output_root(""), fs::path("nimbus_out"));
}

TEST(SeedRange, Parsing) {
  using nimbus::cli::parse_seed_range;
  EXPECT_EQ(parse_seed_range("3..5"), (std::vector<std::uint64_t>{3, 4, 5}));
  EXPECT_EQ(parse_seed_range("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_FALSE(parse_seed_range("5..3"));
  EXPECT_FALSE(parse_seed_range("a..3"));
  EXPECT_FALSE(parse_seed_range(""));
}
