#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Run {
  int status;
  std::string output;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("'") + SPARSEST_CLI_PATH + "' " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), got);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sparsest_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(Cli, HelpExitsZero) {
  const auto r = run("--help");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.output.find("phase"), std::string::npos);
}

TEST_F(Cli, RecoverReportsEverySelector) {
  const auto r = run("recover --n 32 --k 2 --s 2 --seed 3");
  EXPECT_EQ(r.status, 0) << r.output;
  for (const char* name : {"oracle:", "l1linf:", "l1l2:", "thresh-l0:"}) EXPECT_NE(r.output.find(name), std::string::npos) << name;
}

TEST_F(Cli, GeneratedInstanceCanBeRecoveredAndCertified) {
  const auto file = (dir_ / "inst.txt").string();
  ASSERT_EQ(run("generate --n 24 --k 2 --s 2 --delta 0 --out '" + file + "'").status, 0);
  const auto rec = run("recover --instance '" + file + "' --selectors oracle");
  EXPECT_EQ(rec.status, 0) << rec.output;
  EXPECT_NE(rec.output.find("success yes"), std::string::npos) << rec.output;
  const auto cert = run("certify --instance '" + file + "'");
  EXPECT_EQ(cert.status, 0) << cert.output;
  EXPECT_NE(cert.output.find("necessary-condition value"), std::string::npos);
}

TEST_F(Cli, ZeroTrialsIsAConfigurationError) {
  const auto r = run("phase --trials 0 --n 16 --kmax 1 --smax 1");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("--trials"), std::string::npos) << r.output;
}

TEST_F(Cli, InvalidRangesAreConfigurationErrors) {
  EXPECT_EQ(run("phase --n 16 --kmin 4 --kmax 2").status, 1);
  EXPECT_EQ(run("recover --n 8 --k 9").status, 1);
  EXPECT_EQ(run("baseline --mode sideways").status, 1);
  EXPECT_EQ(run("phase --no-such-flag").status, 1);
}

TEST_F(Cli, UnwritableOutputIsAConfigurationError) {
  std::ofstream(dir_ / "blocker") << "x";
  const auto r = run("phase --n 16 --kmax 1 --smax 1 --trials 1 --out '" + (dir_ / "blocker" / "run").string() + "'");
  EXPECT_EQ(r.status, 1) << r.output;
  EXPECT_NE(r.output.find("--out"), std::string::npos) << r.output;
}

TEST_F(Cli, MissingInstanceFileIsARuntimeError) {
  EXPECT_EQ(run("recover --instance '" + (dir_ / "absent.txt").string() + "'").status, 2);
}

TEST_F(Cli, RepeatedRunsWriteIdenticalTables) {
  const std::string args = "phase --n 20 --kmin 1 --kmax 2 --smin 1 --smax 3 --trials 3 --seed 11";
  ASSERT_EQ(run(args + " --out '" + (dir_ / "a").string() + "'").status, 0);
  ASSERT_EQ(run(args + " --workers 2 --out '" + (dir_ / "b").string() + "'").status, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "phase.csv"), slurp(dir_ / "b" / "phase.csv"));
  EXPECT_FALSE(slurp(dir_ / "a" / "phase.csv").empty());
}

TEST_F(Cli, ManifestReplayReproducesTheRun) {
  ASSERT_EQ(run("stability --n 30 --k 2 --s 3 --trials 3 --out '" + (dir_ / "a").string() + "'").status, 0);
  const auto r = run("stability --manifest '" + (dir_ / "a" / "manifest.json").string() + "' --out '" +
                     (dir_ / "b").string() + "'");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(slurp(dir_ / "a" / "stability.csv"), slurp(dir_ / "b" / "stability.csv"));
  const auto wrong = run("phase --manifest '" + (dir_ / "a" / "manifest.json").string() + "'");
  EXPECT_EQ(wrong.status, 1) << wrong.output;
}

}  // namespace
