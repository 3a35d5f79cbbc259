#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

const std::string kData = std::string(UMLA_SOURCE_DIR) + "/tests/data/";

// Runs the CLI from the data directory; stderr is discarded.
Run umla(const std::string& args) {
  std::string cmd = "cd '" + kData + "' && '" UMLA_CLI_PATH "' " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
  int st = pclose(f);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, FourierGolden) {
  auto r = umla("fourier --field Qp:2 --in one_ball.json");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out), json::parse(slurp(kData + "one_ball_fourier.golden.json")));
}

TEST(Cli, WaveFrontOfDelta) {
  auto r = umla("wf exact --field Qp:3 --dist delta0.json");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  ASSERT_EQ(j["cells"].size(), 1u);
  auto& c = j["cells"][0];
  EXPECT_EQ(c["base"][0]["kind"], "point");
  EXPECT_EQ(c["base"][0]["c"], "0");
  EXPECT_EQ(c["fiber"]["type"], "linear");
  EXPECT_EQ(c["fiber"]["zero"], json::array({false}));

  auto t = umla("wf test --field Qp:3 --dist delta0.json --x 0 --xi 1");
  ASSERT_EQ(t.code, 0);
  EXPECT_EQ(json::parse(t.out)["verdict"], "NotSmooth");
  auto s = umla("wf test --field Qp:3 --dist delta0.json --x 1 --xi 1");
  ASSERT_EQ(s.code, 0);
  EXPECT_EQ(json::parse(s.out)["verdict"], "Smooth");
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(umla("fourier --field Qp:4 --in one_ball.json").code, 2);
  EXPECT_EQ(umla("fourier --field Qp:2 --in nope.json").code, 2);
  EXPECT_EQ(umla("fourier --field Qp:3 --in one_ball.json").code, 2);
  EXPECT_EQ(umla("cexp eval --field Qp:3 --env x=1 'x + + 1'").code, 2);
  EXPECT_EQ(umla("cexp eval --field Qp:3 'q^(n*n)'").code, 2);
  EXPECT_EQ(umla("no-such-command").code, 2);
}

TEST(Cli, MathErrorsExitOneWithWitness) {
  auto r = umla("fiber integrate --field Qp:3 --f 'x^2' --y 0");
  ASSERT_EQ(r.code, 1);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["code"], "OnDiscriminant");
  EXPECT_TRUE(j["witness"].contains("message"));

  auto z = umla("wf test --field Qp:3 --dist delta0.json --x 0 --xi 0");
  ASSERT_EQ(z.code, 1);
  EXPECT_EQ(json::parse(z.out)["code"], "ZeroCovector");

  auto a = umla("cexp eval --field Qp:3 --env x=0 '[ac[1](x) == 1]'");
  ASSERT_EQ(a.code, 1);
  EXPECT_EQ(json::parse(a.out)["code"], "EvalError");
}

TEST(Cli, FiberCommands) {
  auto r = umla("fiber integrate --field Qp:3 --f 'x^2' --y 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["text"], "2");
  r = umla("fiber integrate --field Qp:3 --f 'x^2' --y 9");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["text"], "6");
  r = umla("fiber roots --field Qp:3 --g 'x^2 - 4' --k 2");
  ASSERT_EQ(r.code, 0);
  auto roots = json::parse(r.out)["roots"].get<std::vector<std::string>>();
  std::sort(roots.begin(), roots.end());
  EXPECT_EQ(roots, (std::vector<std::string>{"2", "7"}));
}

TEST(Cli, Deterministic) {
  auto a = umla("wf exact --field Qp:3 --dist delta_pair.json");
  auto b = umla("wf exact --field Qp:3 --dist delta_pair.json");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto l1 = umla("fiber levels --field Qp:3 --f 'x^2' --eps 0..3 --m 0..2 --jobs 1");
  auto l3 = umla("fiber levels --field Qp:3 --f 'x^2' --eps 0..3 --m 0..2 --jobs 3");
  ASSERT_EQ(l1.code, 0);
  EXPECT_EQ(l1.out, l3.out);
}

TEST(Cli, CexpEvalAndParse) {
  auto r = umla("cexp eval --field Qp:3 --env x=9 'q^(ord(x)) + psi(x/27)'");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["text"], "9 + 1*z(1/9)");
  auto p = umla("cexp parse 'q^(-ord(x)) * [ord(x) >= 0]'");
  ASSERT_EQ(p.code, 0);
  auto j = json::parse(p.out);
  ASSERT_TRUE(j.contains("ast"));
  std::string tmp = testing::TempDir() + "umla_ast.json";
  std::ofstream(tmp) << j["ast"].dump();
  auto e1 = umla("cexp eval --field Qp:3 --env x=3 'q^(-ord(x)) * [ord(x) >= 0]'");
  auto e2 = umla("cexp eval --field Qp:3 --env x=3 --ast '" + tmp + "'");
  ASSERT_EQ(e1.code, 0);
  EXPECT_EQ(e1.out, e2.out);
}

TEST(Cli, CexpDistributionFamilies) {
  auto ok = umla("cexp dis --family delta.cexp --trials 30");
  ASSERT_EQ(ok.code, 0) << ok.out;
  EXPECT_TRUE(json::parse(ok.out)["pass"].get<bool>());
  // a rejected family is a report, not an error
  auto bad = umla("cexp dis --family planted.cexp --trials 30");
  ASSERT_EQ(bad.code, 0) << bad.out;
  auto j = json::parse(bad.out);
  EXPECT_FALSE(j["pass"].get<bool>());
  int failures = 0;
  for (auto& row : j["rows"]) failures += row["additivity_failures"].get<int>();
  EXPECT_GT(failures, 0);
}

TEST(Cli, SelftestSingleCriterion) {
  auto r = umla("selftest --criterion 7");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}
