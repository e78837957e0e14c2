#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace {

struct Invocation {
  int code = -1;
  std::string out;
};

Invocation run(const std::string& args) {
  const std::string cmd = std::string(SPLA_CLI_PATH) + " " + args + " 2>/dev/null";
  Invocation r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string data_dir = SPLA_DATA_DIR;

}  // namespace

TEST(Cli, AnalyzeJson) {
  const Invocation r = run("analyze " + data_dir + "/exam.csv --format json");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j.begin().key(), "partition");
  EXPECT_TRUE(j.contains("penalty_trace"));
  EXPECT_EQ(j["partition"].size(), 3u);
}

TEST(Cli, AnalyzeIsByteIdentical) {
  const Invocation a = run("analyze " + data_dir + "/oecd.csv --standardize --method pmd");
  const Invocation b = run("analyze " + data_dir + "/oecd.csv --standardize --method pmd");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("min EC"), std::string::npos);
}

TEST(Cli, WritesOutFile) {
  const std::string path = testing::TempDir() + "spla_cli_out.json";
  ASSERT_EQ(run("analyze " + data_dir + "/exam.csv --format json --out " + path).code, 0);
  std::ifstream f(path);
  const auto j = nlohmann::json::parse(f);
  EXPECT_TRUE(j.contains("recommendations"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("bogus").code, 1);
  EXPECT_EQ(run("analyze " + data_dir + "/exam.csv --c-ec 1.5").code, 1);
  EXPECT_EQ(run("analyze " + data_dir + "/exam.csv --grid 1:0:3").code, 1);
  EXPECT_EQ(run("analyze /nonexistent/missing.csv").code, 2);
  EXPECT_EQ(run("reproduce synthetic8").code, 0);
}

TEST(Cli, ReproduceJsonMatchesExitCode) {
  const Invocation r = run("reproduce oecd --format json");
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(r.code, j["pass"].get<bool>() ? 0 : 4);
  EXPECT_FALSE(j["cells"].empty());
}

TEST(Cli, SimulateRateCsv) {
  const Invocation r = run("simulate rate --n 200 --rho 0,0.3 --reps 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "detector,n,rho,c_ec,reps,rate");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
  EXPECT_EQ(r.out, run("simulate rate --n 200 --rho 0,0.3 --reps 3").out);
}

TEST(Cli, SimulateEcAndWishart) {
  const Invocation e = run("simulate ec --n 100 --rho 0.2 --reps 2 --format json");
  ASSERT_EQ(e.code, 0);
  EXPECT_EQ(nlohmann::json::parse(e.out).size(), 6u);
  const Invocation w = run("simulate wishart --reps 4");
  ASSERT_EQ(w.code, 0);
  EXPECT_EQ(w.out.substr(0, w.out.find('\n')), "rep,blocks,ec");
}
