#include "mzi/cli.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mzi/acceptance.hpp"
#include "mzi/csv.hpp"
#include "mzi/error.hpp"
#include "mzi/simulate.hpp"

namespace mzi::cli {
namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "mzi");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        rows.push_back(cells);
    }
    return rows;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("mzi_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

TEST(Csv, NumberFormatting) {
    EXPECT_EQ(csv::format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(csv::format_number(1.0), "1");
    EXPECT_EQ(csv::format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(csv::format_number(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(csv::format_number(std::nan("")), "nan");
    for (double v : {3.141592653589793, 1e-300, -2.5e17, 0.6826894921370859}) {
        EXPECT_EQ(std::stod(csv::format_number(v)), v);
    }
}

TEST(Csv, NumberList) {
    EXPECT_EQ(parse_number_list("-0.715, 0.068,0.839"), (std::vector<double>{-0.715, 0.068, 0.839}));
    EXPECT_THROW(parse_number_list("1,,2"), InvalidConfig);
    EXPECT_THROW(parse_number_list("1,x"), InvalidConfig);
}

TEST(Probs, SixColumnsAndUnitRowSums) {
    const auto r = invoke({"probs", "--nbar", "200", "--a", "0.5", "--b", "3.8", "--steps", "101"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 102u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"phi", "P(-2)", "P(-1)", "P(0)", "P(1)", "P(2)",
                                                 "P(leftover)"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), 7u);
        double sum = 0.0;
        for (std::size_t c = 1; c < 7; ++c) {
            sum += std::stod(rows[i][c]);
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
    EXPECT_NEAR(std::stod(rows[1][0]), -M_PI, 1e-15);
    EXPECT_EQ(std::stod(rows.back()[0]), M_PI);
}

TEST(Probs, DefaultGridAndDeterminism) {
    const auto a = invoke({"probs"});
    const auto b = invoke({"probs"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(parse_csv(a.out).size(), 2002u);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.find('\r'), std::string::npos);
}

TEST(Probs, WritesToFile) {
    TempDir dir;
    const auto file = dir.path() / "p.csv";
    const auto r = invoke({"probs", "--steps", "5", "--out", file.string()});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(slurp(file), invoke({"probs", "--steps", "5"}).out);
}

TEST(Signal, OnesDivergesOnlyWhereExpected) {
    const auto r = invoke({"signal", "--eigenvalues", "ones", "--steps", "2001"});
    ASSERT_EQ(r.code, 0);
    const auto rows = parse_csv(r.out);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"phi", "signal_mean", "delta_phi", "crb"}));
    // phi = 0 sits on the grid at the signal peak: the sensitivity diverges,
    // while the far bins keep the bound finite but very large.
    const auto& centre = rows[1001];
    EXPECT_EQ(std::stod(centre[0]), 0.0);
    EXPECT_EQ(centre[2], "inf");
    EXPECT_GT(std::stod(centre[3]), 1e3);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_NE(rows[i][1], "inf");
        EXPECT_NE(rows[i][1], "nan");
    }
}

TEST(Signal, AlternatingTracksBound) {
    const auto r = invoke({"signal", "--eigenvalues", "alternating", "--phi-min", "-3.09",
                           "--phi-max", "3.09", "--steps", "2000"});
    ASSERT_EQ(r.code, 0);
    const auto rows = parse_csv(r.out);
    int kept = 0;
    int good = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double d = std::stod(rows[i][2]);
        const double bound = std::stod(rows[i][3]);
        if (bound > 10.0 * 1.37 / std::sqrt(200.0)) {
            continue;
        }
        ++kept;
        good += d / bound <= 1.25 ? 1 : 0;
    }
    EXPECT_GE(good, 0.9 * kept);
}

TEST(Signal, RegressionVectorMatchesExplicitList) {
    const auto named = invoke({"signal", "--eigenvalues", "regression", "--steps", "33"});
    const auto listed =
        invoke({"signal", "--eigenvalues=-0.715,0.068,0.839,-0.102,0.392", "--steps", "33"});
    ASSERT_EQ(named.code, 0) << named.err;
    ASSERT_EQ(listed.code, 0) << listed.err;
    EXPECT_EQ(named.out, listed.out);
    // Row at phi = pi/2: frozen signal of the regression vector.
    const auto rows = parse_csv(named.out);
    const double mid = std::stod(rows[25][1]);
    const Resolved r = resolve(RunConfig{.eigenvalues = "regression"});
    EXPECT_EQ(mid, signal(r.cfg, r.scheme, r.obs, std::stod(rows[25][0])).mean);
}

TEST(Sweep, SingleCellMatchesDirectCalls) {
    const auto r = invoke({"sweep", "--nbar-axis", "200", "--a-axis", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"nbar", "a", "resolution_ratio", "sensitivity_ratio",
                                                 "visibility"}));
    const SweepCell cell = sweep_cell(200.0, 0.5);
    EXPECT_EQ(rows[1][2], csv::format_number(cell.resolution_ratio));
    EXPECT_EQ(rows[1][3], csv::format_number(cell.sensitivity_ratio));
    EXPECT_EQ(rows[1][4], csv::format_number(cell.visibility));
    EXPECT_NEAR(std::stod(rows[1][3]) * 1.37, 1.0, 0.05);
}

TEST(Sweep, LongFormatOrder) {
    const auto r = invoke({"sweep", "--nbar-axis", "5,50", "--a-axis", "0.1,0.5,1"});
    ASSERT_EQ(r.code, 0);
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[1][0], "5");
    EXPECT_EQ(rows[1][1], "0.10000000000000001");
    EXPECT_EQ(rows[3][1], "1");
    EXPECT_EQ(rows[4][0], "50");
}

TEST(Sweep, BadAxisIsConfigError) {
    EXPECT_EQ(invoke({"sweep", "--nbar-axis", "50,5", "--a-axis", "0.5"}).code, kExitInvalidConfig);
    EXPECT_EQ(invoke({"sweep", "--nbar-axis", "a,b"}).code, kExitInvalidConfig);
}

TEST(Simulate, WritesCalibrationAndEstimation) {
    TempDir dir;
    const auto prefix = (dir.path() / "run").string();
    const auto r = invoke({"simulate", "--nbar", "1000", "--b", "3.2", "--kf", "5", "--eigenvalues",
                           "alternating", "--phi-min", "-0.3", "--phi-max", "0.3", "--steps", "7",
                           "--shots", "200", "--replicas", "50", "--seed", "7", "--out", prefix});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto cal = parse_csv(slurp(prefix + "_calibration.csv"));
    ASSERT_EQ(cal.size(), 8u);
    EXPECT_EQ(cal[0].size(), 1u + 2u * 12u);
    EXPECT_EQ(cal[0][1], "freq(-5)");
    EXPECT_EQ(cal[0][13], "std(-5)");
    const auto est = parse_csv(slurp(prefix + "_estimation.csv"));
    ASSERT_EQ(est.size(), 8u);
    EXPECT_EQ(est[0], (std::vector<std::string>{"phi", "mean_signal", "sigma", "crb", "bias", "std_dev",
                                                "mean_estimate", "clamped", "error"}));
    // phi = 0 is a signal extremum: flagged, not fatal.
    EXPECT_EQ(std::stod(est[4][0]), 0.0);
    EXPECT_EQ(est[4][8], "non_monotone_branch");
    EXPECT_EQ(est[4][2], "nan");
    for (std::size_t i : {1u, 2u, 3u, 5u, 6u, 7u}) {
        EXPECT_EQ(est[i][8], "") << i;
        EXPECT_LT(std::fabs(std::stod(est[i][4])), std::stod(est[i][5])) << i;
    }
}

TEST(Simulate, ByteIdenticalReruns) {
    TempDir dir;
    const std::vector<std::string> common = {"simulate", "--steps", "9", "--replicas", "5", "--seed", "11"};
    auto with_out = [&](const std::string& name) {
        auto args = common;
        args.push_back("--out");
        args.push_back((dir.path() / name).string());
        return invoke(args).code;
    };
    ASSERT_EQ(with_out("a"), 0);
    ASSERT_EQ(with_out("b"), 0);
    EXPECT_EQ(slurp(dir.path() / "a_calibration.csv"), slurp(dir.path() / "b_calibration.csv"));
    EXPECT_EQ(slurp(dir.path() / "a_estimation.csv"), slurp(dir.path() / "b_estimation.csv"));
    ASSERT_EQ(with_out("c") , 0);
    auto args = common;
    args[6] = "12";
    args.push_back("--out");
    args.push_back((dir.path() / "d").string());
    ASSERT_EQ(invoke(args).code, 0);
    EXPECT_NE(slurp(dir.path() / "c_calibration.csv"), slurp(dir.path() / "d_calibration.csv"));
}

TEST(Validation, DistinctMessagesAndExitCode) {
    const auto overlap = invoke({"probs", "--a", "2", "--b", "3"});
    const auto shots = invoke({"simulate", "--shots", "0"});
    const auto replicas = invoke({"simulate", "--replicas", "-3"});
    const auto length = invoke({"signal", "--eigenvalues", "1,2,3"});
    for (const auto* r : {&overlap, &shots, &replicas, &length}) {
        EXPECT_EQ(r->code, kExitInvalidConfig);
        EXPECT_FALSE(r->err.empty());
    }
    EXPECT_NE(overlap.err.find("2a"), std::string::npos);
    EXPECT_NE(shots.err.find("shots"), std::string::npos);
    EXPECT_NE(replicas.err.find("replicas"), std::string::npos);
    EXPECT_NE(length.err.find("eigenvalue list"), std::string::npos);
    EXPECT_NE(overlap.err, shots.err);
    EXPECT_NE(shots.err, replicas.err);
}

TEST(Validation, ParseErrors) {
    EXPECT_EQ(invoke({}).code, kExitInvalidConfig);
    EXPECT_EQ(invoke({"probs", "--nbar", "200", "--alpha0", "3"}).code, kExitInvalidConfig);
    EXPECT_EQ(invoke({"probs", "--nbar", "-1"}).code, kExitInvalidConfig);
    EXPECT_EQ(invoke({"probs", "--steps", "many"}).code, kExitInvalidConfig);
    EXPECT_EQ(invoke({"reproduce", "fig9"}).code, kExitInvalidConfig);
    EXPECT_EQ(invoke({"--help"}).code, kExitOk);
}

TEST(Config, FileValuesWithFlagOverride) {
    TempDir dir;
    const auto file = dir.path() / "run.toml";
    std::ofstream(file) << "nbar = 1000\nb = 3.2\nkf = 5\neigenvalues = \"alternating\"\nsteps = 11\n";
    const auto from_file = invoke({"signal", "--config", file.string()});
    const auto from_flags = invoke({"signal", "--nbar", "1000", "--b", "3.2", "--kf", "5", "--eigenvalues",
                                    "alternating", "--steps", "11"});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_EQ(from_file.out, from_flags.out);
    const auto overridden = invoke({"signal", "--config", file.string(), "--steps", "3"});
    EXPECT_EQ(parse_csv(overridden.out).size(), 4u);
}

TEST(Resolve, DefaultCutoffAndAlpha) {
    RunConfig rc;
    EXPECT_EQ(resolve(rc).scheme.cutoff(), 2);
    rc.nbar = 1000.0;
    rc.b = 3.2;
    EXPECT_EQ(resolve(rc).scheme.cutoff(), 5);
    RunConfig by_alpha;
    by_alpha.alpha0 = 2.0;
    EXPECT_EQ(resolve(by_alpha).cfg.nbar(), 4.0);
}

TEST(Reproduce, Fig3WritesThreeDatasets) {
    TempDir dir;
    std::ostringstream log;
    const bool ok = reproduce("fig3", dir.path(), log);
    EXPECT_TRUE(ok) << log.str();
    for (const char* name : {"fig3_ones.csv", "fig3_regression.csv", "fig3_alternating.csv", "fig3_summary.txt"}) {
        EXPECT_TRUE(std::filesystem::exists(dir.path() / name)) << name;
    }
    EXPECT_EQ(acceptance::checks_for_figure("fig3").size(), 4u);
}

TEST(Reproduce, Fig2WritesSixOutcomeCalibration) {
    TempDir dir;
    const auto r = invoke({"reproduce", "fig2", "--out", dir.path().string()});
    EXPECT_EQ(r.code, kExitOk) << r.out;
    const auto cal = parse_csv(slurp(dir.path() / "fig2_calibration.csv"));
    EXPECT_EQ(cal.size(), 42u);
    EXPECT_EQ(cal[0].size(), 13u);
}

}  // namespace
}  // namespace mzi::cli
