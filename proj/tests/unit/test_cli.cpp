#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "matchlab/matchlab.hpp"

using namespace matchlab;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(MATCHLAB_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fixture(const std::string& name) { return std::string(MATCHLAB_FIXTURE_DIR) + "/" + name; }

}  // namespace

TEST(Cli, SolveFirstExample) {
  const CliRun r = run("solve " + fixture("example1_p1.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(matching_from_json(Json::parse(r.out), 2, 2), fixtures::example1_mu());
  const CliRun w = run("solve --rule wpda " + fixture("example1_p1.json"));
  EXPECT_EQ(matching_from_json(Json::parse(w.out), 2, 2), fixtures::example1_mu_tilde());
}

TEST(Cli, SolveTracePrecedesMatching) {
  const CliRun r = run("solve --trace " + fixture("example1_p1.json"));
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(Json::parse(lines[0])["step"], 1);
  EXPECT_TRUE(Json::parse(lines[1]).contains("pairs"));
}

TEST(Cli, SolveCollegeMarket) {
  const CliRun r = run("solve --rule spda " + fixture("example2_mto.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(mto_matching_from_json(Json::parse(r.out), {2, 1, 1}, 5), fixtures::example2_truthful_outcome());
  EXPECT_EQ(run("solve " + fixture("example2_mto.json")).code, 64);
}

TEST(Cli, StableSet) {
  const CliRun r = run("stable-set " + fixture("example1_p1.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(Json::parse(r.out).size(), 2u);
}

TEST(Cli, ManipulateFindsWitness) {
  const CliRun r = run("manipulate " + fixture("example1_p1.json") + " " + fixture("full_2x2_domain.json"));
  ASSERT_EQ(r.code, 0);
  const Json w = Json::parse(r.out);
  EXPECT_EQ(w["coalition"], Json::array({"w1"}));
  const CliRun none = run("manipulate " + fixture("example1_p1.json") + " " + fixture("singleton_anonymous_2x2_domain.json"));
  EXPECT_EQ(none.code, 64);  // the base is not in that domain
}

TEST(Cli, BudgetAndSizeGuards) {
  EXPECT_EQ(run("manipulate --max-coalition 4 --budget 5 " + fixture("example1_p1.json") + " " + fixture("full_2x2_domain.json")).code,
            2);
  EXPECT_EQ(run("manipulate --max-coalition 4 --budget 5 --samples 3 " + fixture("example1_p1.json") + " " +
                fixture("full_2x2_domain.json"))
                .code,
            0);
}

TEST(Cli, CheckDomain) {
  const CliRun a = run("check-domain --property anonymity " + fixture("singleton_anonymous_2x2_domain.json"));
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out.substr(0, 4), "true");
  const CliRun td = run("check-domain --property top-dominance --side men " + fixture("full_2x2_domain.json"));
  EXPECT_EQ(td.code, 1);
  EXPECT_EQ(td.out.substr(0, 5), "false");
  const CliRun sp = run("check-domain --property single-peaked --json " + fixture("single_peaked_2x2_domain.json") + " " +
                     fixture("identity_orderings_2x2.json"));
  EXPECT_EQ(sp.code, 0);
  EXPECT_EQ(Json::parse(sp.out)["holds"], true);
}

TEST(Cli, VerifyExitCodes) {
  const CliRun v = run("verify --suite example2 --json");
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(Json::parse(v.out)["verdict"], "pass");
  EXPECT_EQ(run("verify --suite example1 --men 3").code, 64);
  EXPECT_EQ(run("verify --suite nope").code, 64);
}

TEST(Cli, BadInputs) {
  EXPECT_EQ(run("solve " + fixture("no_such_file.json")).code, 64);
  const std::string bad = testing::TempDir() + "matchlab_bad.json";
  std::ofstream(bad) << R"({"men": 1, "women": 1, "preferences": {"m1": ["w1", "w1"]}})";
  EXPECT_EQ(run("solve " + bad).code, 64);
  std::ofstream(bad) << "{not json";
  EXPECT_EQ(run("solve " + bad).code, 64);
  EXPECT_EQ(run("frobnicate").code, 64);
  EXPECT_EQ(run("--help").code, 0);
}
