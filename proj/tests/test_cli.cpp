#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("uf_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = std::string(UF_CLI) + " " + args + " 2>" + err.string();
  FILE* p = ::popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = ::pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, slurp(err)};
}

const std::string kBordeaux = "--scenario " UF_DATA_DIR "/bordeaux.scenario";

std::string tight_scenario() {
  auto text = slurp(UF_TEST_DATA_DIR "/minimal.scenario");
  text.replace(text.find("lead_time_h: 8"), 14, "lead_time_h: 0.5");
  const auto path = scratch() / "tight.scenario";
  std::ofstream(path) << text;
  return "--scenario " + path.string();
}

}  // namespace

TEST(Cli, EvaluateIsByteIdentical) {
  for (const std::string fmt : {"table", "json", "csv"}) {
    const auto a = run("evaluate " + kBordeaux + " --scheme pi --format " + fmt);
    const auto b = run("evaluate " + kBordeaux + " --scheme pi --format " + fmt);
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_FALSE(a.out.empty());
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Cli, EvaluateJsonHasKpis) {
  const auto r = run("evaluate " + kBordeaux + " --scheme ucc --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["scheme"], "ucc");
  EXPECT_DOUBLE_EQ(j["totals"]["handling_cost"].get<double>(), 840.0);
  EXPECT_EQ(j["layers"].size(), 2u);
}

TEST(Cli, CompareWithBaseline) {
  const auto r = run("compare " + kBordeaux + " --schemes ucc,pi,original --baseline original --format csv");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(first.rfind("original,", 0), 0u);
  EXPECT_NE(header.find("total_cost_delta_pct"), std::string::npos);
  EXPECT_EQ(r.out, run("compare " + kBordeaux + " --schemes ucc,pi,original --baseline original --format csv").out);
}

TEST(Cli, OptimizeIsDeterministic) {
  const std::string args = "optimize " + kBordeaux +
                           " --scheme s1 --layer 1 --vehicles t25_F,t17_F,v23_F --seed 3 --format json";
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_TRUE(j["sa"]["feasible"].get<bool>());
  EXPECT_TRUE(j.contains("scheme_totals"));
}

TEST(Cli, OptimizeWithOracleAndTrace) {
  const auto r = run("optimize " + kBordeaux +
                     " --scheme s1 --layer 1 --vehicles t25_F,t17_F --seed 1 --oracle --trace --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.contains("grid"));
  EXPECT_FALSE(j["sa"]["trace"].empty());
  EXPECT_LE(j["sa"]["objective"].get<double>(), 1.02 * j["grid"]["objective"].get<double>());
}

TEST(Cli, SweepIsByteIdentical) {
  const std::string args = "sweep " + kBordeaux + " --scheme pi --layer 2 --param speed_kmh --range 15:30:5 --format csv";
  const auto a = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, run(args).out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 5);
}

TEST(Cli, OutputFile) {
  const auto path = scratch() / "out.json";
  const auto r = run("evaluate " + kBordeaux + " --scheme original --format json --output " + path.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(path), run("evaluate " + kBordeaux + " --scheme original --format json").out);
}

TEST(Cli, ValidateAcceptsAndRejects) {
  EXPECT_EQ(run("validate " + kBordeaux).code, 0);
  for (const auto& e : fs::directory_iterator(UF_TEST_DATA_DIR "/invalid")) {
    const auto r = run("validate --scenario " + e.path().string());
    EXPECT_EQ(r.code, 2) << e.path();
    EXPECT_NE(r.err.find(e.path().filename().string()), std::string::npos) << r.err;
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("evaluate " + kBordeaux).code, 2);
  EXPECT_EQ(run("evaluate " + kBordeaux + " --scheme nope").code, 2);
  EXPECT_EQ(run("evaluate " + kBordeaux + " --scheme pi --format xml").code, 2);
  EXPECT_EQ(run("evaluate --scenario /nonexistent.scenario --scheme pi").code, 2);
  EXPECT_EQ(run("sweep " + kBordeaux + " --scheme pi --layer 2 --param lead_time_h --range 8:3:1").code, 2);
  EXPECT_EQ(run("sweep " + kBordeaux + " --scheme pi --layer 7 --param lead_time_h --range 3:8:1").code, 2);
  EXPECT_EQ(run("optimize " + kBordeaux + " --scheme ucc --layer 2 --vehicles t17_A,ghost").code, 2);
  EXPECT_EQ(run("evaluate " + kBordeaux + " --scheme pi --output /nonexistent/dir/x.txt").code, 2);
}

TEST(Cli, InfeasibleExitsThree) {
  const auto r = run("evaluate " + tight_scenario() + " --scheme direct");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("lead_time"), std::string::npos) << r.err;
  const auto o = run("optimize " + tight_scenario() + " --scheme direct --layer 1 --vehicles big,small");
  EXPECT_EQ(o.code, 3);
}

TEST(Cli, InfeasibleSweepPointsAreMarked) {
  const auto r = run("sweep " + tight_scenario() + " --scheme direct --layer 1 --param lead_time_h --range 0.5:8:0.5 --format csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("infeasible"), std::string::npos);
}
