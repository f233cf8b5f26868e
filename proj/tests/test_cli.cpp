#include <gtest/gtest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
    int status;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / (std::string("hhlab_cli_") + info->name() + "_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    Result run(const std::string& args, const fs::path& out_dir) {
        const fs::path err = dir / "stderr.txt";
        const std::string cmd = "HHLAB_OUTPUT_DIR='" + out_dir.string() + "' '" HHLAB_CLI_PATH "' " + args + " 2>'" +
                                err.string() + "'";
        Result r{};
        FILE* pipe = ::popen(cmd.c_str(), "r");
        if (!pipe) return {-1, "", ""};
        std::array<char, 4096> buf{};
        std::size_t n;
        while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
        const int raw = ::pclose(pipe);
        r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
        r.err = slurp(err);
        return r;
    }
    Result run(const std::string& args) { return run(args, dir / "out"); }
};

}  // namespace

TEST_F(Cli, SolveReference) {
    const Result r = run("solve --n 4 --m 2 --p 2 --R 1");
    ASSERT_EQ(r.status, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_GE(j["sup_norm"].get<double>(), 4.0);
    EXPECT_NEAR(j["rho"].get<double>(), 4.0, 1e-12);
    EXPECT_LT(j["residual"].get<double>(), 1e-8);
    EXPECT_NEAR(j["lambda1"].get<double>(), 215.5606, 0.01);
    bool saw_energy = false, saw_lower = false;
    for (const auto& c : j["certificates"]) {
        EXPECT_TRUE(c["ok"].get<bool>()) << c.dump();
        EXPECT_FALSE(c["tag"].get<std::string>().empty());
        if (c["tag"] == "eq:3-41") saw_energy = true;
        if (c["tag"] == "eq:1.8") saw_lower = true;
    }
    EXPECT_TRUE(saw_energy);
    EXPECT_TRUE(saw_lower);
    EXPECT_TRUE(fs::exists(dir / "out" / "solution.csv"));
    EXPECT_TRUE(fs::exists(dir / "out" / "solve.json"));
}

TEST_F(Cli, KernelsSelftest) {
    const Result r = run("kernels-selftest");
    ASSERT_EQ(r.status, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["compositions"].size(), 20u);
    EXPECT_LT(j["max_gap"].get<double>(), 1e-2);
    for (const auto& c : j["compositions"]) EXPECT_LT(c["gap"].get<double>(), 1e-2);
}

TEST_F(Cli, UnknownFlagWritesNothing) {
    const fs::path out = dir / "untouched";
    const Result r = run("solve --no-such-flag 3", out);
    EXPECT_EQ(r.status, 2);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_TRUE(r.out.empty());
    const json e = json::parse(r.err);
    EXPECT_EQ(e["error"], "config");
}

TEST_F(Cli, InvalidParametersAreConfigErrors) {
    for (const char* args : {"solve --p 0.5", "scan --axis 1", "singular --order 3", "eigen --nodes 4",
                             "shoot --init 1", "frobnicate", ""}) {
        const Result r = run(args);
        EXPECT_EQ(r.status, 2) << args;
        EXPECT_TRUE(json::accept(r.err)) << args << ": " << r.err;
    }
}

TEST_F(Cli, FailedCertificateExitsOne) {
    // a hopelessly coarse singular profile fails its residual certificate
    const Result r = run("singular --step 0.05 --order 2");
    EXPECT_EQ(r.status, 1);
    const json j = json::parse(r.out);
    EXPECT_FALSE(j["certificates"][0]["ok"].get<bool>());
}

TEST_F(Cli, LadderCsv) {
    const Result r = run("ladder --steps 3");
    ASSERT_EQ(r.status, 0) << r.err;
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "k,log_l,alpha");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 4);
    const json j = json::parse(slurp(dir / "out" / "ladder.json"));
    EXPECT_NEAR(j["threshold"].get<double>(), 16777216.0, 1e-6);
}

TEST_F(Cli, LadderGrowthAtThresholdForLargeP) {
    const Result r = run("ladder --n 6 --m 3 --a 1 --p 3 --M 0.8 --steps 40");
    ASSERT_EQ(r.status, 0) << r.err;
    const json j = json::parse(slurp(dir / "out" / "ladder.json"));
    for (const auto& c : j["certificates"]) EXPECT_TRUE(c["ok"].get<bool>()) << c.dump();
}

TEST_F(Cli, EigenAndSingular) {
    Result r = run("eigen --n 4 --m 1");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["lambda1"].get<double>(), 14.682, 1e-3);
    r = run("singular --p 3");
    ASSERT_EQ(r.status, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_FALSE(j["exists"].get<bool>());
    EXPECT_TRUE(j["C"].is_null());
}

TEST_F(Cli, ShootAndScan) {
    Result r = run("shoot --m 1 --p 3 --init 2.8284271247461903 --trace");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["kind"], "survived");
    EXPECT_TRUE(fs::exists(dir / "out" / "trace.csv"));
    r = run("scan --axis 0.1:10:5 --axis -10:10:5 --stability --workers 2");
    ASSERT_EQ(r.status, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["cells"].get<int>(), 25);
    EXPECT_EQ(j["tally"]["survived"].get<int>(), 0);
}

TEST_F(Cli, DeterministicOutputs) {
    const std::string args = "scan --axis 0.5:4:4 --axis -3:3:4 --workers 3";
    ASSERT_EQ(run(args, dir / "a").status, 0);
    ASSERT_EQ(run(args, dir / "b").status, 0);
    EXPECT_EQ(slurp(dir / "a" / "scan.csv"), slurp(dir / "b" / "scan.csv"));
    ASSERT_EQ(run("kernels-selftest --samples 4 --seed 9", dir / "a").status, 0);
    ASSERT_EQ(run("kernels-selftest --samples 4 --seed 9", dir / "b").status, 0);
    EXPECT_EQ(slurp(dir / "a" / "compositions.csv"), slurp(dir / "b" / "compositions.csv"));
    ASSERT_EQ(run("solve --nodes 129", dir / "a").status, 0);
    ASSERT_EQ(run("solve --nodes 129", dir / "b").status, 0);
    EXPECT_EQ(slurp(dir / "a" / "solution.csv"), slurp(dir / "b" / "solution.csv"));
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
    const fs::path cfg = dir / "run.ini";
    std::ofstream(cfg) << "[solve]\nn = 4\nm = 3\np = 3\nnodes = 257\n";
    Result r = run("--config '" + cfg.string() + "' solve");
    ASSERT_EQ(r.status, 0) << r.err;
    json j = json::parse(r.out);
    EXPECT_EQ(j["params"]["m"], 3);
    EXPECT_EQ(j["nodes"], 257);
    r = run("--config '" + cfg.string() + "' solve --nodes 129");
    ASSERT_EQ(r.status, 0) << r.err;
    j = json::parse(r.out);
    EXPECT_EQ(j["nodes"], 129);
    EXPECT_EQ(j["params"]["m"], 3);

    std::ofstream(cfg) << "[solve]\nbogus_key = 1\n";
    r = run("--config '" + cfg.string() + "' solve");
    EXPECT_EQ(r.status, 2);
}

TEST_F(Cli, OutFlagOverridesEnvironment) {
    const fs::path other = dir / "explicit";
    const Result r = run("--out '" + other.string() + "' eigen --n 3 --m 1", dir / "env");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(fs::exists(other / "eigen.json"));
    EXPECT_FALSE(fs::exists(dir / "env"));
}

TEST_F(Cli, ReportTable) {
    const Result r = run("report");
    ASSERT_EQ(r.status, 0) << r.out << r.err;
    EXPECT_NE(r.out.find("eq:3-41"), std::string::npos);
    EXPECT_NE(r.out.find("eq:1.8"), std::string::npos);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}
