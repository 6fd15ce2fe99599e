#include "appl/cli.hpp"

#include "support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace appl;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
    auto path = std::filesystem::temp_directory_path() / ("appl_cli_" + name);
    std::ofstream(path) << text;
    return path.string();
}

} // namespace

TEST(Cli, Usage) {
    EXPECT_EQ(run({}).code, cli::Usage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::Usage);
    EXPECT_EQ(run({"simulate", test::corpus("coin"), "--traces", "0"}).code, cli::Usage);
    EXPECT_EQ(run({"simulate", test::corpus("coin"), "--set", "nope=1"}).code, cli::Usage);
    EXPECT_EQ(run({"parse", "/nonexistent/file.appl"}).code, cli::Usage);
    EXPECT_EQ(run({"--help"}).code, cli::Ok);
}

TEST(Cli, ParseErrorsExitTwo) {
    auto bad = temp_file("bad.appl", "func main() { tick( }");
    auto r = run({"parse", bad});
    EXPECT_EQ(r.code, cli::ParseFailed);
    EXPECT_NE(r.err.find("bad.appl:1:"), std::string::npos);
    auto ok = run({"parse", test::corpus("rdwalk")});
    EXPECT_EQ(ok.code, cli::Ok);
    auto j = nlohmann::json::parse(ok.out);
    EXPECT_EQ(j["schema"], "appl-parse/1");
}

TEST(Cli, CheckVerdicts) {
    EXPECT_EQ(run({"check", test::corpus("rdwalk")}).code, cli::Ok);
    auto bogus = temp_file("bogus.appl", "func main() { {# true; 0 #} tick(1) }");
    EXPECT_EQ(run({"check", bogus}).code, cli::CheckRejected);
    auto missing = temp_file("missing.appl", "vars x; func main() { while (x < 1) { x := x + 1 } }");
    EXPECT_EQ(run({"check", missing}).code, cli::CheckRejected);
}

TEST(Cli, PreconditionEnforced) {
    EXPECT_EQ(run({"certify", test::corpus("rdwalk"), "--set", "d=-1"}).code, cli::Usage);
}

TEST(Cli, OracleExitCodes) {
    auto r = run({"oracle", test::corpus("coin"), "--horizon", "50"});
    EXPECT_EQ(r.code, cli::Ok);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["schema"], "appl-oracle/1");
    EXPECT_EQ(run({"oracle", test::corpus("rdwalk"), "--set", "d=2"}).code, cli::OracleInfeasible);
}

TEST(Cli, CertifyStatuses) {
    auto sound = run({"certify", test::corpus("rdwalk"), "--set", "d=5", "--traces", "20000"});
    EXPECT_EQ(sound.code, cli::Ok);
    auto j = nlohmann::json::parse(sound.out);
    EXPECT_EQ(j["schema"], "appl-cert/1");
    EXPECT_EQ(j["status"], "SOUND-BOUND");
    EXPECT_EQ(j["bound"]["exact"], "14");

    auto failed = run({"certify", test::corpus("counterexample"), "--set", "N=3", "--traces", "20000", "--horizon",
                       "16384"});
    EXPECT_EQ(failed.code, cli::OstFailed);
    EXPECT_EQ(nlohmann::json::parse(failed.out)["status"], "OST-FAILED");

    auto bogus = temp_file("bogus2.appl", "func main() { {# true; 0 #} tick(1) }");
    auto rejected = run({"certify", bogus});
    EXPECT_EQ(rejected.code, cli::CheckRejected);
    EXPECT_EQ(nlohmann::json::parse(rejected.out)["status"], "CHECK-FAILED");
}

TEST(Cli, JsonFileAndSummary) {
    auto path = (std::filesystem::temp_directory_path() / "appl_cli_report.json").string();
    auto r = run({"simulate", test::corpus("coin"), "--traces", "1000", "--json", path});
    EXPECT_EQ(r.code, cli::Ok);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
    std::ifstream in(path);
    auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j["schema"], "appl-simulate/1");
}

TEST(Cli, ReportsAreByteIdenticalAcrossThreadCounts) {
    for (const auto& cmd : std::vector<std::vector<std::string>>{
             {"simulate", test::corpus("rdwalk"), "--set", "d=5", "--traces", "5000"},
             {"diagnose", test::corpus("rdwalk"), "--set", "d=5", "--traces", "2000", "--configs", "50", "--draws",
              "50"},
             {"certify", test::corpus("geometric"), "--traces", "5000"},
         }) {
        auto one = cmd, four = cmd;
        one.insert(one.end(), {"--threads", "1"});
        four.insert(four.end(), {"--threads", "4"});
        auto a = run(one), b = run(four), c = run(one);
        EXPECT_EQ(a.code, cli::Ok) << cmd[0] << a.err;
        EXPECT_EQ(a.out, b.out) << cmd[0];
        EXPECT_EQ(a.out, c.out) << cmd[0];
    }
}
