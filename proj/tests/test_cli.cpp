#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "commands.hpp"
#include "json.hpp"
#include "report.hpp"

namespace fs = std::filesystem;
using iic::cli::read_file;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = iic::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("iic_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string dir(const std::string& sub = "") const { return (dir_ / sub).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CoupleZeroReplicasGivesHeaderOnly) {
  const auto r = run({"couple", "--replicas", "0", "--out-dir", dir()});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string csv = read_file(dir_ / "couple.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
  EXPECT_EQ(csv.rfind("k,m,n,backend,replicas,hits,duals,agrees,", 0), 0U);
  const auto manifest = nlohmann::json::parse(read_file(dir_ / "couple.manifest.json"));
  EXPECT_EQ(manifest["command"], "couple");
  EXPECT_EQ(manifest["flags"]["replicas"], 0);
  EXPECT_EQ(manifest["replica_range"][1], 0);
  EXPECT_TRUE(manifest.contains("timestamp"));
  EXPECT_TRUE(manifest.contains("version"));
}

TEST_F(Cli, CoupleWritesSummaryAndTrace) {
  const auto r = run({"couple", "--k", "0", "--m", "1", "--n", "2", "--replicas", "3000", "--seed",
                      "4", "--trace", "trace.jsonl", "--trace-replicas", "2", "--out-dir", dir()});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string csv = read_file(dir_ / "couple.csv");
  EXPECT_NE(csv.find("\n0,1,2,exact,3000,"), std::string::npos);
  std::istringstream trace(read_file(dir_ / "trace.jsonl"));
  std::string line;
  int lines = 0;
  while (std::getline(trace, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j["replica"] == 0 || j["replica"] == 1);
    ++lines;
  }
  EXPECT_EQ(lines, 2 * 7);
}

TEST_F(Cli, JsonOutput) {
  const auto r = run({"arm", "--kind", "white", "--k", "1", "--m", "2", "--trials", "5000", "--out",
                      "json", "--out-dir", dir()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = nlohmann::json::parse(read_file(dir_ / "arm.json"));
  ASSERT_EQ(rows.size(), 1U);
  EXPECT_EQ(rows[0]["trials"], 5000);
  EXPECT_GT(rows[0]["p_hat"].get<double>(), 0.99);
}

TEST_F(Cli, ExactTvRow) {
  const auto r = run({"tv", "--k", "0", "--m", "1", "--n", "2", "--mode", "exact", "--region", "ring1",
                      "--out-dir", dir()});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string csv = read_file(dir_ / "tv.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,m,n,mode,region,tv,bound,trials,ci");
  EXPECT_NE(csv.find("0,1,2,exact,ring1,0.01147289184,0.984375,,"), std::string::npos) << csv;
}

TEST_F(Cli, CapacityAndUsageErrors) {
  EXPECT_EQ(run({"verify", "--n", "3", "--backend", "exact", "--out-dir", dir()}).code, 2);
  EXPECT_EQ(run({"tv", "--k", "1", "--m", "2", "--n", "3", "--out-dir", dir()}).code, 2);
  EXPECT_EQ(run({"couple", "--k", "3", "--m", "1", "--out-dir", dir()}).code, 2);
  EXPECT_EQ(run({"couple", "--backend", "fast"}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, VerifyReportIsReproducible) {
  const std::vector<std::string> base{"verify", "--samples", "40", "--replicas", "3000",
                                      "--proof-replicas", "2000", "--seed", "8"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out-dir", dir("a")});
  b.insert(b.end(), {"--out-dir", dir("b")});
  const auto ra = run(a);
  const auto rb = run(b);
  EXPECT_EQ(ra.code, rb.code);
  EXPECT_EQ(ra.out, rb.out);
  EXPECT_EQ(read_file(dir_ / "a" / "verify.csv"), read_file(dir_ / "b" / "verify.csv"));
  const std::string report = ra.out;
  for (const char* check : {"max_tv_arm_vs_circuit", "max_tv_circuit_vs_interior", "hit_iff_dual (0,1,2)",
                            "agree_when_not_hit (0,2,2)", "black_circuits (1,2,2)",
                            "exact_thresholds_checked"}) {
    EXPECT_NE(report.find(check), std::string::npos) << check;
  }
  // Only the sampling-noise law checks may fail at this tiny replica count.
  std::istringstream lines(report);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find(",FAIL") != std::string::npos) {
      EXPECT_NE(line.find("tv_omega_"), std::string::npos) << line;
    }
  }
}

TEST_F(Cli, ReplayReproducesOutputsAcrossWorkerCounts) {
  ::setenv("IIC_WORKERS", "1", 1);
  const auto first = run({"couple", "--k", "1", "--m", "2", "--n", "2", "--replicas", "3000", "--seed",
                          "21", "--backend", "auto", "--out-dir", dir("orig")});
  ASSERT_EQ(first.code, 0) << first.err;
  ::setenv("IIC_WORKERS", "3", 1);
  const auto replay = run({"replay", "--manifest", dir("orig/couple.manifest.json"), "--out-dir",
                           dir("again")});
  ::unsetenv("IIC_WORKERS");
  EXPECT_EQ(replay.code, 0) << replay.err;
  EXPECT_EQ(replay.out, "couple.csv,identical\n");
}

TEST_F(Cli, ReplayDetectsTamperedOutput) {
  ASSERT_EQ(run({"arm", "--trials", "100", "--out-dir", dir("orig")}).code, 0);
  iic::cli::write_file(dir_ / "orig" / "arm.csv", "tampered\n");
  const auto replay = run({"replay", "--manifest", dir("orig/arm.manifest.json"), "--out-dir",
                           dir("again")});
  EXPECT_EQ(replay.code, 1);
  EXPECT_EQ(replay.out, "arm.csv,differs\n");
}

TEST_F(Cli, ExponentSmallRun) {
  const auto r = run({"exponent", "--scales", "4,8,16,32", "--trials", "4000", "--band-lo", "0",
                      "--band-hi", "1", "--out-dir", dir()});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string fit = read_file(dir_ / "exponent_fit.csv");
  EXPECT_NE(fit.find(",true,true"), std::string::npos) << fit;
  EXPECT_NE(fit.find("\"4,8,16,32\""), std::string::npos) << fit;
  EXPECT_EQ(run({"exponent", "--p", "0.4", "--out-dir", dir()}).code, 2);
}
