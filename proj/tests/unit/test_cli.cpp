#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "qdesign/serialize.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = qdesign::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qdesign_cli_test";
  fs::create_directories(dir);
  fs::path p = dir / name;
  fs::remove(p);
  return p;
}

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"bogus"}).code, 1);
  const auto missing_out = run({"design", "--noise", "gaussian:sigma=1"});
  EXPECT_EQ(missing_out.code, 1);
  EXPECT_NE(missing_out.err.find("--out"), std::string::npos);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, BadNoiseNamesTheFlag) {
  const auto r = run({"simulate", "--noise", "gg:beta=2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--noise"), std::string::npos);
}

TEST(Cli, ThetaOutOfRangeExitsOne) {
  const auto r = run({"simulate", "--noise", "gaussian:sigma=1", "--theta", "1.5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--theta"), std::string::npos);
}

TEST(Cli, DesignWithoutDensityExitsOne) {
  EXPECT_EQ(run({"design", "--noise", "pointmass", "--out", scratch("pm.json").string()}).code, 1);
}

TEST(Cli, LaplacianConditionCheckExitsOne) {
  const auto r = run({"check-condition", "--noise", "gg:beta=1,sigma=1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Laplacian"), std::string::npos);
}

TEST(Cli, ConditionCheckPrintsVerdict) {
  EXPECT_EQ(run({"check-condition", "--noise", "gg:beta=2,sigma=1"}).out, "true\n");
  const auto r = run({"check-condition", "--noise", "gg:beta=2,sigma=0.5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("false\nwitness w=", 0), 0u);
}

TEST(Cli, UnconvergedDesignExitsTwo) {
  const auto r = run({"design", "--noise", "gaussian:sigma=0.2", "--K", "50", "--max-iterations", "3", "--out",
                      scratch("short.json").string()});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, InadmissibleQuantizerExitsThree) {
  const auto file = scratch("wiggle.json");
  qdesign::write_file(file.string(), R"({"K": 10, "slopes": [5, 5, -5, -5, 5, 5, -5, -5, 0, 5]})");
  const auto r = run({"simulate", "--noise", "pointmass", "--quantizer", "aupl:file=" + file.string(), "--trials",
                      "10"});
  EXPECT_EQ(r.code, 3);
}

TEST(Cli, LimitsReportsAgreement) {
  const auto r = run({"limits", "--family", "gaussian"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("limit_closed_form 1.27323954"), std::string::npos);
  EXPECT_NE(r.out.find("agree true"), std::string::npos);
  EXPECT_NE(run({"limits", "--family", "laplacian"}).out.find("limit_closed_form 1.6211389"), std::string::npos);
}

TEST(Cli, SimulateIsDeterministic) {
  const auto csv = scratch("sim.csv");
  const std::vector<std::string> args{"simulate", "--noise", "gaussian:sigma=1", "--N", "200", "--trials", "300",
                                      "--seed", "9", "--csv", csv.string()};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const std::string text = qdesign::read_file(csv.string());
  const auto header_end = text.find('\n');
  EXPECT_EQ(text.substr(0, header_end), "theta,N,trials,mse,bias,crb_over_N,efficiency,clamps");
  const std::string rows = text.substr(header_end + 1);
  ASSERT_EQ(rows.size() % 2, 0u);
  EXPECT_EQ(rows.substr(0, rows.size() / 2), rows.substr(rows.size() / 2));
}

TEST(Cli, CrbCurveWritesSidecar) {
  const auto csv = scratch("curve.csv");
  ASSERT_EQ(run({"crb-curve", "--noise", "gaussian:sigma=1", "--L", "20", "--out", csv.string()}).code, 0);
  EXPECT_EQ(qdesign::read_file(csv.string()).rfind("theta,g,crb\n0,0.5,", 0), 0u);
  const std::string side = qdesign::read_file(fs::path(csv).replace_extension(".json").string());
  EXPECT_NE(side.find("\"L\": 20"), std::string::npos);
}

TEST(Cli, SweepRowsFollowSigmaOrder) {
  const auto csv = scratch("sweep.csv");
  const auto r = run({"sweep", "--family", "gaussian", "--sigmas", "1,0.5", "--quantizers", "threshold,dither",
                      "--out", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(qdesign::read_file(csv.string()));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "sigma,quantizer,min_fisher_info,phi");
  EXPECT_EQ(lines[1].rfind("0.5,threshold,", 0), 0u);
  EXPECT_EQ(lines[2].rfind("0.5,dither,", 0), 0u);
  EXPECT_EQ(lines[3].rfind("1,threshold,", 0), 0u);
  // Above the critical level the dithered curve falls back to the threshold.
  EXPECT_EQ(lines[3].substr(lines[3].find(',', 2)), lines[4].substr(lines[4].find(',', 2)));
}

TEST(Cli, ConfigFileFillsUnsetFlags) {
  const auto cfg = scratch("qdesign.toml");
  qdesign::write_file(cfg.string(), "[simulate]\nnoise=\"gaussian:sigma=1\"\nN=50\ntrials=100\n");
  const auto r = run({"--config", cfg.string(), "simulate", "--trials", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"N\": 50"), std::string::npos);
  EXPECT_NE(r.out.find("\"trials\": 20"), std::string::npos);
}
