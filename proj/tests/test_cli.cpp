#include <gtest/gtest.h>

#include <sstream>

#include "pnk/cli.hpp"

using namespace pnk;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "pnk");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string prog(const std::string& name) { return std::string(PNK_PROGRAMS_DIR) + "/" + name; }

}  // namespace

TEST(Cli, EquivalentPrograms) {
    auto r = run({"equiv", prog("loop.pnk"), prog("assign0.pnk")});
    EXPECT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["result"], "equal");
    EXPECT_EQ(j["mode"], "exact");
}

TEST(Cli, InequivalentProgramsReportAWitness) {
    auto r = run({"equiv", prog("assign0.pnk"), prog("assign1.pnk")});
    EXPECT_EQ(r.code, 1);
    auto j = json::parse(r.out);
    EXPECT_EQ(j["result"], "not-equal");
    ASSERT_TRUE(j.contains("witness"));
    EXPECT_EQ(j["witness"]["input"], json::parse(R"([{"f":0}])"));
    EXPECT_EQ(j["witness"]["left"], "1");
    EXPECT_EQ(j["witness"]["right"], "0");
}

TEST(Cli, OrderOnToyDelivery) {
    auto r = run({"leq", prog("toy_naive_f2.pnk"), prog("toy_resilient_f2.pnk"), "--inputs", prog("toy_in_rows.json")});
    EXPECT_EQ(r.code, 0) << r.err;
    r = run({"leq", prog("toy_resilient_f2.pnk"), prog("toy_naive_f2.pnk"), "--inputs", prog("toy_in_rows.json")});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, QueryDelivery) {
    auto r = run({"query", prog("toy_naive_f2.pnk"), "--inputs", R"([[{"sw":1,"pt":1}]])", "--measure", "nonempty"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["rows"][0]["value"], "4/5");
    r = run({"--float", "query", prog("toy_resilient_f2.pnk"), "--inputs", R"([[{"sw":1,"pt":1}]])", "--measure",
             "nonempty", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("0.96"), std::string::npos) << r.out;
    r = run({"query", prog("toy_naive_f2.pnk"), "--inputs", "singletons", "--measure", "bogus:x"});
    EXPECT_EQ(r.code, 2);
}

TEST(Cli, DistAndSample) {
    auto r = run({"dist", prog("coin_star.pnk"), "--inputs", "singletons"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_FALSE(j["rows"].empty());
    r = run({"sample", prog("coin_star.pnk"), "--inputs", "singletons", "--samples", "2000", "--check"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST(Cli, Errors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"equiv", prog("loop.pnk")}).code, 2);
    EXPECT_EQ(run({"--exact", "--float", "dist", prog("loop.pnk")}).code, 2);
    auto r = run({"dist", "f:=7"});  // literal program without a universe
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
    r = run({"dist", "f:=", "--universe", R"({"fields":[{"name":"f","size":2}]})"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("parse error"), std::string::npos) << r.err;
    EXPECT_EQ(run({"casestudy", "nope"}).code, 2);
}

TEST(Cli, ResourceLimitIsAnError) {
    auto r = run({"--max-states", "1", "dist", prog("coin_star.pnk"), "--inputs", "singletons"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("resource limit"), std::string::npos) << r.err;
}

TEST(Cli, ToyCaseStudyCsv) {
    auto r = run({"--exact", "casestudy", "toy-overview", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# toy-overview"), std::string::npos);
    EXPECT_NE(r.out.find("4/5"), std::string::npos);
    EXPECT_NE(r.out.find("24/25"), std::string::npos);
    EXPECT_EQ(r.out.find(",no\n"), std::string::npos) << r.out;
}

TEST(Cli, HelpAndVersion) {
    EXPECT_EQ(run({"--help"}).code, 0);
    auto v = run({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find("pnk"), std::string::npos);
}
