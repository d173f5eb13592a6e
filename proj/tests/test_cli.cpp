#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcsp/cli/app.hpp"

using qcsp::cli::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

Result run(std::vector<std::string> args, const std::string& env = {}) {
  args.insert(args.begin(), "qcsp");
  std::ostringstream out, err;
  int code = qcsp::cli::run(args, out, err, env);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("qcsp-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    for (const char* f : {"k4", "chen-gap", "leq", "two-clique", "sigma-tau", "intro"})
      ASSERT_EQ(run({"fixtures", f, "--out", dir.string()}).code, 0) << f;
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, FixturesWriteFiles) {
  for (const char* f : {"k4.struct", "k4.ph", "chen-gap.struct", "leq.struct", "two-clique.struct",
                        "sigma-tau.struct", "tau-language.struct", "intro-ternary.struct", "intro-nae.struct"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  std::ifstream in(path("chen-gap.struct"));
  std::string text((std::istreambuf_iterator<char>(in)), {});
  qcsp::Document d = qcsp::parse_document(text);
  EXPECT_EQ(d.structure.domain_size(), 3u);
  ASSERT_EQ(d.operations.size(), 2u);
  EXPECT_EQ(d.operations[0].arity(), 4u);
  EXPECT_EQ(qcsp::print_document(d.structure, d.operations), text);
  Result list = run({"--json", "fixtures", "list"});
  EXPECT_EQ(list.code, 0);
  EXPECT_EQ(list.doc()["fixtures"].size(), 7u);
  EXPECT_EQ(run({"fixtures", "nope"}).code, 3);
}

TEST_F(Cli, EvalK4IsFalse) {
  Result r = run({"--json", "eval", "--structure", path("k4.struct"), "--sentence", path("k4.ph")});
  EXPECT_EQ(r.code, 1);
  json d = r.doc();
  EXPECT_EQ(d["command"], "eval");
  EXPECT_FALSE(d["verdict"]["holds"].get<bool>());
  EXPECT_TRUE(d["verdict"]["witness"].contains("counter"));
  EXPECT_EQ(d["exit_code"], 1);
}

TEST_F(Cli, EvalTrueAndText) {
  Result r = run({"eval", "--structure", path("leq.struct"), "--phi", "A x E y : le(x,y)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("holds: true"), std::string::npos);
  Result csp = run({"eval", "--csp", "--structure", path("k4.struct"), "--sentence", path("k4.ph")});
  EXPECT_EQ(csp.code, 3);
}

TEST_F(Cli, EvalRestricted) {
  Result r = run({"--json", "eval-restricted", "--structure", path("two-clique.struct"), "--phi",
                  "A x E y : E(x,y)", "--adversary", "full:1"});
  EXPECT_EQ(r.code, 0);
  Result single = run({"eval-restricted", "--structure", path("k4.struct"), "--sentence", path("k4.ph"),
                       "--adversary", "tuples:(0,1,2)"});
  EXPECT_EQ(single.code, 0);
}

TEST_F(Cli, ClassifyChenGap) {
  Result r = run({"--json", "classify", "--ops", path("chen-gap.struct")});
  EXPECT_EQ(r.code, 0);
  json d = r.doc();
  EXPECT_EQ(d["outcome"], "PGP");
  EXPECT_EQ(d["violations"].size(), 6u);
}

TEST_F(Cli, CollapsibleLeq) {
  Result r = run({"--json", "collapsible", "--structure", path("leq.struct"), "--source", "0", "--p", "1"});
  EXPECT_EQ(r.code, 0);
  json d = r.doc();
  EXPECT_EQ(d["route"], "canonical-sentence");
  EXPECT_TRUE(d["witness_verified"].get<bool>());
}

TEST_F(Cli, Gadgets) {
  Result pp = run({"--json", "gadget", "ppdef", "--k", "2"});
  EXPECT_EQ(pp.code, 0);
  EXPECT_TRUE(pp.doc()["equal"].get<bool>());
  EXPECT_EQ(pp.doc()["conjuncts"], 9);
  Result nae = run({"--json", "gadget", "naesat", "--vars", "3", "--clauses", "1,2,3", "--evaluate"});
  EXPECT_EQ(nae.code, 1);  // satisfiable instance, so ψ is false
  Result bad = run({"gadget", "naesat", "--vars", "2", "--clauses", "1,2,9"});
  EXPECT_EQ(bad.code, 3);
}

TEST_F(Cli, ShopAndNu) {
  EXPECT_EQ(run({"shop", "--structure", path("two-clique.struct")}).code, 1);
  EXPECT_EQ(run({"nu", "--m", "2"}).code, 0);
  EXPECT_EQ(run({"nu", "--m", "1", "--a", "0"}).code, 1);
}

TEST_F(Cli, UnknownFlagIsInputError) {
  Result r = run({"eval", "--structure", path("k4.struct"), "--frobnicate"});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({}).code, 3);
  EXPECT_EQ(run({"eval", "--structure", path("missing.struct"), "--phi", "E x : E(x,x)"}).code, 3);
}

TEST_F(Cli, JsonReportIsDeterministic) {
  std::vector<std::string> args{"--json", "--seed", "7", "classify", "--ops", path("chen-gap.struct")};
  Result a = run(args), b = run(args);
  EXPECT_EQ(a.out, b.out);
  json d = a.doc();
  EXPECT_EQ(d["seed"], 7);
  for (const char* k : {"command", "inputs_digest", "budget", "exit_code"}) EXPECT_TRUE(d.contains(k)) << k;
  EXPECT_FALSE(d.contains("timings"));
  json t = run({"--json", "--timings", "classify", "--ops", path("chen-gap.struct")}).doc();
  EXPECT_TRUE(t["timings"].contains("total_ms"));
}

TEST_F(Cli, DigestFollowsInputContent) {
  std::vector<std::string> args{"--json", "eval", "--structure", path("leq.struct"), "--phi", "E x : le(x,x)"};
  std::string before = run(args).doc()["inputs_digest"];
  std::ofstream(path("leq.struct"), std::ios::app) << "# changed\n";
  std::string after = run(args).doc()["inputs_digest"];
  EXPECT_NE(before, after);
}

TEST_F(Cli, BudgetFromEnvironmentAndFlag) {
  std::vector<std::string> args{"--json", "eval", "--structure", path("k4.struct"), "--sentence", path("k4.ph")};
  Result starved = run(args, "nodes=5");
  EXPECT_EQ(starved.code, 2);
  EXPECT_TRUE(starved.doc().contains("inconclusive"));
  EXPECT_EQ(starved.doc()["budget"]["nodes"], 5);
  std::vector<std::string> flag = args;
  flag.insert(flag.begin() + 1, {"--budget", "nodes=100000"});
  EXPECT_EQ(run(flag, "nodes=5").code, 1);  // flag wins
  EXPECT_EQ(run(args, "bogus=1").code, 3);
}

TEST_F(Cli, ReduceRoundTrip) {
  Result r = run({"--json", "reduce", "qcsp-to-csp", "--structure", path("k4.struct"), "--phi",
                  "A x E z : E(x,z)", "--adversary", "tuples:(0);(1)", "--emit"});
  EXPECT_EQ(r.code, 0);
  Result bad = run({"reduce", "qcsp-to-csp", "--structure", path("k4.struct"), "--phi", "A x E z : E(x,z)",
                    "--adversary", "tuples:(3)"});
  EXPECT_EQ(bad.code, 3);  // element 3 has no constant
}
