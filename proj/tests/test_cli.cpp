// Runs the rc binary end to end.
#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run rc(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + RC_BINARY + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string fixture(const std::string& name) { return std::string(RC_FIXTURES) + "/" + name; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("rc_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Cli, TaxNeurips) {
    auto r = rc("tax --schedule " + fixture("neurips_db_schedule.json"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "tau=1.125 RC, rounded=1 RC, cost(rho=3)=4 RC, outlay(n=2800)=11200 RC\n");
    r = rc("tax --schedule " + fixture("neurips_db_schedule.json") + " --exact --n 100");
    EXPECT_EQ(r.out, "tau=1.125 RC, rounded=1 RC, cost(rho=3)=4.125 RC, outlay(n=100)=412.5 RC\n");
}

TEST(Cli, TaxEmptyAndMalformed) {
    auto r = rc("tax --schedule " + fixture("empty_schedule.json"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("tau=0 RC", 0), 0u);
    EXPECT_EQ(rc("tax --schedule " + fixture("malformed_schedule.json")).code, 1);
    EXPECT_EQ(rc("tax --schedule /nonexistent.json").code, 1);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(rc("").code, 2);
    EXPECT_EQ(rc("tax").code, 2);
    EXPECT_EQ(rc("tax --schedule x --bogus").code, 2);
    EXPECT_EQ(rc("frobnicate").code, 2);
    EXPECT_EQ(rc("--help").code, 0);
}

TEST(Cli, SimulateWritesReportsDeterministically) {
    auto a = scratch("sim_a");
    auto b = scratch("sim_b");
    auto r = rc("simulate --scenario " + fixture("mixed_scenario.json") + " --out " + a.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("supply_conserved=true chain_verified=true"), std::string::npos);
    ASSERT_EQ(rc("simulate --scenario " + fixture("mixed_scenario.json") + " --out " + b.string()).code, 0);
    for (const char* f : {"report.json", "cycles.csv", "ledger.jsonl"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    auto v = rc("ledger verify " + (a / "ledger.jsonl").string());
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.out.rfind("OK: ", 0), 0u);
}

TEST(Cli, SeedOverride) {
    auto a = scratch("seed_a");
    auto b = scratch("seed_b");
    ASSERT_EQ(rc("simulate --scenario " + fixture("mixed_scenario.json") + " --out " + a.string(), "RC_SEED=99").code, 0);
    ASSERT_EQ(rc("simulate --scenario " + fixture("mixed_scenario.json") + " --out " + b.string()).code, 0);
    EXPECT_NE(slurp(a / "report.json"), slurp(b / "report.json"));
    EXPECT_NE(slurp(a / "report.json").find("\"rng_seed\": 99"), std::string::npos);
    EXPECT_EQ(rc("simulate --scenario " + fixture("mixed_scenario.json") + " --out " + a.string(), "RC_SEED=abc").code, 2);
}

TEST(Cli, SimulateMissingScenario) {
    EXPECT_NE(rc("simulate --scenario /nonexistent.json --out " + scratch("missing").string()).code, 0);
}

TEST(Cli, LedgerVerifyTamperedAndEmpty) {
    auto dir = scratch("verify");
    ASSERT_EQ(rc("simulate --scenario " + fixture("honest_scenario.json") + " --out " + dir.string()).code, 0);
    auto text = slurp(dir / "ledger.jsonl");
    // Change the memo of line 5.
    std::size_t pos = 0;
    for (int line = 1; line < 5; ++line) pos = text.find('\n', pos) + 1;
    auto memo = text.find("\"memo\":\"", pos) + 8;
    text.insert(memo, "x");
    std::ofstream(dir / "tampered.jsonl", std::ios::binary) << text;
    auto r = rc("ledger verify " + (dir / "tampered.jsonl").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("seq 5"), std::string::npos) << r.out;

    std::ofstream(dir / "empty.jsonl").close();
    r = rc("ledger verify " + (dir / "empty.jsonl").string());
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "OK: 0 transactions\n");
    EXPECT_EQ(rc("ledger verify /nonexistent.jsonl").code, 1);
}

TEST(Cli, LedgerShow) {
    auto dir = scratch("show");
    ASSERT_EQ(rc("simulate --scenario " + fixture("honest_scenario.json") + " --out " + dir.string()).code, 0);
    auto r = rc("ledger show " + (dir / "ledger.jsonl").string() + " --account treasury:honest");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("1 Mint"), std::string::npos);
    EXPECT_NE(r.out.find("balance treasury:honest "), std::string::npos);
    EXPECT_EQ(rc("ledger show " + (dir / "ledger.jsonl").string() + " --account nope").code, 1);
}

TEST(Cli, BootstrapPlan) {
    auto r = rc("bootstrap plan --history " + fixture("history.json") + " --n 1 --rho 1 --tau 1000");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\"sigma_mrc\": 4000"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("\"top_up_mrc\": 3000"), std::string::npos);
    EXPECT_EQ(rc("bootstrap plan --history " + fixture("history.json") + " --n 1 --rho 1").code, 2);
}
