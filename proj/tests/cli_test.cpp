#include "pmanifold/cli.hpp"
#include "pmanifold/io.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using pmanifold::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("pmanifold_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"bogus"}).code, 2);
    EXPECT_EQ(invoke({"generate", "--kind", "paraboloid", "-o", path("x.csv")}).code, 2) << "seed is mandatory";
    EXPECT_EQ(invoke({"sweep", "--kind", "p", "-o", path("s.csv")}).code, 2);
    const Result r = invoke({"generate", "--kind", "torus", "--seed", "1", "-o", path("x.csv")});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, ParaboloidFitEmbedInvertMetric) {
    ASSERT_EQ(invoke({"generate", "--kind", "paraboloid", "--n", "2000", "--seed", "7", "-o", path("p.csv")}).code, 0);
    const auto header = pmanifold::read_csv(path("p.csv")).header;
    ASSERT_TRUE(header.has_value());
    EXPECT_EQ((*header)["seed"], 7);

    const Result fit =
        invoke({"fit", "-i", path("p.csv"), "-o", path("m.json"), "--p", "0.9", "--nc", "14", "14", "--axes", "0", "1"});
    ASSERT_EQ(fit.code, 0) << fit.err;
    const auto model = nlohmann::json::parse(slurp(path("m.json")));
    EXPECT_GE(model["nodes"].size(), 150u);
    EXPECT_EQ(model["run"]["nc"], nlohmann::json::array({14, 14}));

    ASSERT_EQ(invoke({"embed", "-m", path("m.json"), "-i", path("p.csv"), "-o", path("e.csv")}).code, 0);
    const auto emb = pmanifold::read_csv(path("e.csv"));
    EXPECT_EQ(emb.rows.size(), 2000u);
    EXPECT_EQ(emb.rows[0].size(), 2u);
    std::ofstream(path("x.csv")) << "0,0\n0.2,-0.1\n";
    const Result inv = invoke({"invert", "-m", path("m.json"), "-i", path("x.csv"), "-o", path("y.csv")});
    ASSERT_EQ(inv.code, 0) << inv.err;
    const auto back = pmanifold::read_csv(path("y.csv")).rows;
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].size(), 3u);

    ASSERT_EQ(invoke({"metric", "-i", path("p.csv"), "-e", path("e.csv"), "-o", path("d.json")}).code, 0);
    const auto metrics = nlohmann::json::parse(slurp(path("d.json")));
    EXPECT_GT(metrics["delta"].get<double>(), 0.0);
    EXPECT_GT(metrics["mean_knn_distance"].get<double>(), 0.0);
}

TEST_F(Cli, InconsistentRowsExitWithDataError) {
    std::ofstream(path("bad.csv")) << "1,2,3\n4,5\n";
    ASSERT_EQ(invoke({"generate", "--kind", "paraboloid", "--n", "600", "--seed", "1", "-o", path("p.csv")}).code, 0);
    ASSERT_EQ(invoke({"fit", "-i", path("p.csv"), "-o", path("m.json"), "--nc", "5", "5", "--axes", "0", "1"}).code, 0);
    const Result r = invoke({"embed", "-m", path("m.json"), "-i", path("bad.csv"), "-o", path("e.csv")});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("bad.csv:2"), std::string::npos);
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
    EXPECT_FALSE(fs::exists(path("e.csv")));
}

TEST_F(Cli, AlgorithmFailureExitCode) {
    std::ofstream(path("line.csv")) << "0,0,0\n1,1,1\n2,2,2\n3,3,3\n";
    const Result r = invoke({"fit", "-i", path("line.csv"), "-o", path("m.json")});
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("second principal direction undefined"), std::string::npos);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
    std::vector<std::string> artifacts;
    for (const char* threads : {"1", "3"}) {
        ASSERT_EQ(invoke({"generate", "--kind", "swiss_roll", "--n", "1200", "--noise", "0.2", "--seed", "3", "-o",
                          path("r.csv")})
                      .code,
                  0);
        ASSERT_EQ(invoke({"--threads", threads, "fit", "-i", path("r.csv"), "-o", path("m.json"), "--nc", "8", "8",
                          "--p", "0.8"})
                      .code,
                  0);
        ASSERT_EQ(invoke({"--threads", threads, "embed", "-m", path("m.json"), "-i", path("r.csv"), "-o",
                          path("e.csv")})
                      .code,
                  0);
        artifacts.push_back(slurp(path("r.csv")) + slurp(path("m.json")) + slurp(path("e.csv")));
    }
    EXPECT_EQ(artifacts[0], artifacts[1]);
}

TEST_F(Cli, PredatorTruthAndCorrelation) {
    ASSERT_EQ(invoke({"generate", "--kind", "predator_mobbing", "--agents", "6", "--steps", "300", "--rho", "3",
                      "--seed", "2", "-o", path("pm.csv")})
                  .code,
              0);
    ASSERT_TRUE(fs::exists(path("pm_truth.csv")));
    ASSERT_EQ(invoke({"isomap", "-i", path("pm.csv"), "--k", "8", "--dims", "2", "-o", path("iso.csv"), "--residuals",
                      path("rv.csv")})
                  .code,
              0);
    EXPECT_EQ(pmanifold::read_csv(path("rv.csv")).rows.size(), 2u);
    const Result m = invoke({"metric", "-i", path("pm.csv"), "-e", path("iso.csv"), "--truth", path("pm_truth.csv"),
                             "-o", path("m.json")});
    ASSERT_EQ(m.code, 0) << m.err;
    EXPECT_NE(m.out.find("r_total "), std::string::npos);
    const auto j = nlohmann::json::parse(slurp(path("m.json")));
    EXPECT_TRUE(j.contains("correlation"));
    EXPECT_EQ(j["run"]["k"], 10);
}

TEST_F(Cli, ConfigFileMergesUnderFlags) {
    std::ofstream(path("cfg.json")) << R"({"kind": "paraboloid", "n": 50, "seed": 9})";
    ASSERT_EQ(invoke({"--config", path("cfg.json"), "generate", "-o", path("a.csv")}).code, 0);
    EXPECT_EQ(pmanifold::read_csv(path("a.csv")).rows.size(), 50u);
    ASSERT_EQ(invoke({"--config", path("cfg.json"), "generate", "--n", "70", "-o", path("b.csv")}).code, 0);
    EXPECT_EQ(pmanifold::read_csv(path("b.csv")).rows.size(), 70u);
}

TEST_F(Cli, SmallSweepWritesRowsAndReport) {
    const Result r = invoke({"sweep", "--kind", "p", "--seed", "1", "--start", "0.5", "--stop", "0.9", "--step", "0.2",
                             "--n", "800", "--nc", "6", "6", "-o", path("s.csv"), "--report", path("s.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = pmanifold::read_csv(path("s.csv"));
    EXPECT_EQ(t.rows.size(), 3u);
    EXPECT_EQ((*t.header)["kind"], "p");
    const auto report = nlohmann::json::parse(slurp(path("s.json")));
    EXPECT_EQ(report["fit"]["kind"], "linear");
}
