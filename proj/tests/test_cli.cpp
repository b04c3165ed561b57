#include "specfic/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace specfic;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("specfic_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(IngestCsv, PlainColumn) {
  const fs::path dir = temp_dir("ingest1");
  write(dir / "a.csv", "1\n2\n3\n");
  const TimeSeries y = ingest_csv((dir / "a.csv").string());
  ASSERT_EQ(y.n(), 3);
  EXPECT_EQ(y.values[0], 1.0);
  EXPECT_EQ(y.values[2], 3.0);
}

TEST(IngestCsv, HeaderAndCrlf) {
  const fs::path dir = temp_dir("ingest2");
  write(dir / "a.csv", "value\r\n1.5\r\n-2.5\r\n");
  const TimeSeries y = ingest_csv((dir / "a.csv").string());
  ASSERT_EQ(y.n(), 2);
  EXPECT_EQ(y.values[1], -2.5);
}

TEST(IngestCsv, ErrorsNameTheRow) {
  const fs::path dir = temp_dir("ingest3");
  write(dir / "a.csv", "1\n2\n3\n4\nabc\n");
  try {
    ingest_csv((dir / "a.csv").string());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 5"), std::string::npos);
  }
  write(dir / "b.csv", "1\nnan\n");
  EXPECT_THROW(ingest_csv((dir / "b.csv").string()), ParseError);
  write(dir / "c.csv", "");
  EXPECT_THROW(ingest_csv((dir / "c.csv").string()), ParseError);
  EXPECT_THROW(ingest_csv((dir / "missing.csv").string()), ParseError);
}

TEST(RunConfig, StrictParsing) {
  EXPECT_THROW(RunConfig::from_json_text("{\"comand\": \"fic\"}"), ConfigError);
  EXPECT_THROW(RunConfig::from_json_text("not json"), ConfigError);
  EXPECT_THROW(RunConfig::from_json_text(
                   "{\"focus\": {\"type\": \"lag_cov\", \"lga\": 1}}"),
               ConfigError);
  const RunConfig cfg = RunConfig::from_json_text(
      R"({"command":"fic","input":"x.csv","candidates":[{"family":"ar","order":2}],
          "focus":{"type":"lag_corr","lag":1},"seed":7,"n":50})");
  EXPECT_EQ(cfg.command, "fic");
  ASSERT_EQ(cfg.candidates.size(), 1u);
  EXPECT_EQ(cfg.candidates[0].ar, 2);
  ASSERT_EQ(cfg.foci.size(), 1u);
  EXPECT_EQ(cfg.foci[0].type, "lag_corr");
  EXPECT_EQ(cfg.seed, 7u);
}

TEST(RunConfig, UnknownFocusListsConstructors) {
  try {
    RunConfig::from_json_text(R"({"focus":{"type":"quantile"}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("lag_cov"), std::string::npos);
    EXPECT_NE(msg.find("band_mass"), std::string::npos);
    EXPECT_NE(msg.find("threshold_prob"), std::string::npos);
  }
}

TEST(RunConfig, RoundTripThroughJson) {
  RunConfig cfg;
  cfg.command = "mc";
  cfg.truth = TruthSpec{{"ar", 2, 0, std::nullopt}, {0.7, -0.6, 1.0}};
  cfg.candidates = {{"ar", 1, 0, std::nullopt}, {"np", 0, 0, std::nullopt}};
  FocusSpec f;
  f.type = "lag_cov";
  f.lag = 2;
  cfg.foci = {f};
  cfg.comparators = {"fic"};
  cfg.B = 5;
  cfg.n = 32;
  const RunConfig back = RunConfig::from_json_text(cfg.to_json_text());
  EXPECT_EQ(back.command, "mc");
  ASSERT_TRUE(back.truth.has_value());
  EXPECT_EQ(back.truth->theta.size(), 3u);
  EXPECT_EQ(back.candidates.size(), 2u);
  EXPECT_EQ(back.foci[0].lag, 2);
}

TEST(SpecMaterialization, FamiliesAndFoci) {
  CandidateSpec ar;
  ar.family = "ar";
  ar.ar = 2;
  EXPECT_EQ(family_from_spec(ar).label(), "AR(2)");
  CandidateSpec np;
  np.family = "np";
  EXPECT_FALSE(candidate_from_spec(np).is_parametric());
  FocusSpec band;
  band.type = "band_mass";
  band.a = 0.5;
  band.b = 1.5;
  EXPECT_EQ(focus_from_spec(band).k(), 1);
  FocusSpec bogus;
  bogus.type = "nope";
  EXPECT_THROW(focus_from_spec(bogus), ConfigError);
}

TEST(CmdFic, HappyPathWritesReports) {
  const fs::path dir = temp_dir("cmdfic");
  const std::vector<double> data = oracles::ar1_series(0.5, 1.0, 120, 3);
  std::string csv = "value\n";
  for (double v : data) csv += std::to_string(v) + "\n";
  write(dir / "series.csv", csv);

  RunConfig cfg;
  cfg.command = "fic";
  cfg.input = (dir / "series.csv").string();
  cfg.out = (dir / "out").string();
  cfg.candidates = {{"ar", 0, 0, std::nullopt},
                    {"ar", 1, 0, std::nullopt},
                    {"ar", 2, 0, std::nullopt},
                    {"ma", 0, 1, std::nullopt},
                    {"np", 0, 0, std::nullopt}};
  FocusSpec f;
  f.type = "lag_corr";
  f.lag = 1;
  cfg.foci = {f};
  cfg.quad_nodes = 512;

  std::ostringstream os;
  EXPECT_EQ(run_command(cfg, os), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "report.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "resolved_config.json"));
  const std::string report = slurp(dir / "out" / "report.json");
  EXPECT_NE(report.find("\"rows\""), std::string::npos);
  // five candidates in the printed table
  EXPECT_NE(os.str().find("AR(2)"), std::string::npos);
}

TEST(CmdFic, ConstantInputGivesExitCode2) {
  const fs::path dir = temp_dir("cmdfic2");
  write(dir / "series.csv", "value\n1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n");
  RunConfig cfg;
  cfg.command = "fic";
  cfg.input = (dir / "series.csv").string();
  cfg.out = (dir / "out").string();
  cfg.candidates = {{"ar", 1, 0, std::nullopt}, {"np", 0, 0, std::nullopt}};
  FocusSpec f;
  f.type = "lag_corr";
  f.lag = 1;
  cfg.foci = {f};
  cfg.quad_nodes = 512;
  std::ostringstream os;
  EXPECT_EQ(run_command(cfg, os), 2);
  const std::string report = slurp(dir / "out" / "report.json");
  EXPECT_NE(report.find("degenerate"), std::string::npos);
}

TEST(CmdReproduce, UnknownFigureIsConfigError) {
  RunConfig cfg;
  cfg.command = "reproduce";
  cfg.figure = "fig9";
  std::ostringstream os;
  EXPECT_THROW(run_command(cfg, os), ConfigError);
}

TEST(CmdSimulate, RoundTripsThroughIngest) {
  const fs::path dir = temp_dir("cmdsim");
  RunConfig cfg;
  cfg.command = "simulate";
  cfg.truth = TruthSpec{{"ar", 1, 0, std::nullopt}, {0.5, 1.0}};
  cfg.n = 64;
  cfg.seed = 9;
  cfg.out = (dir / "out").string();
  cfg.quad_nodes = 512;
  std::ostringstream os;
  ASSERT_EQ(run_command(cfg, os), 0);
  const TimeSeries y = ingest_csv((dir / "out" / "series.csv").string());
  EXPECT_EQ(y.n(), 64);
}

TEST(CmdMc, ReproducibleByteIdenticalOutputs) {
  const fs::path dir = temp_dir("cmdmc");
  RunConfig cfg;
  cfg.command = "mc";
  cfg.truth = TruthSpec{{"ar", 1, 0, std::nullopt}, {0.6, 1.0}};
  cfg.n = 48;
  cfg.B = 6;
  cfg.seed = 77;
  cfg.candidates = {{"ar", 1, 0, std::nullopt}, {"np", 0, 0, std::nullopt}};
  FocusSpec f;
  f.type = "lag_cov";
  f.lag = 1;
  cfg.foci = {f};
  cfg.comparators = {"fic", "always_np"};
  cfg.quad_nodes = 512;
  cfg.out = (dir / "a").string();
  std::ostringstream os;
  ASSERT_EQ(run_command(cfg, os), 0);
  cfg.out = (dir / "b").string();
  ASSERT_EQ(run_command(cfg, os), 0);
  EXPECT_EQ(slurp(dir / "a" / "mc_result.json"),
            slurp(dir / "b" / "mc_result.json"));
  EXPECT_EQ(slurp(dir / "a" / "mc_result.csv"),
            slurp(dir / "b" / "mc_result.csv"));
}

#ifdef SPECFIC_CLI_PATH
TEST(CliBinary, EndToEndExitCodes) {
  const fs::path dir = temp_dir("clibin");
  const std::string binary = SPECFIC_CLI_PATH;
  // unknown figure -> exit 1
  const int bad = std::system(
      (binary + " reproduce fig9 --out " + (dir / "x").string() +
       " >/dev/null 2>&1")
          .c_str());
  EXPECT_EQ(WEXITSTATUS(bad), 1);
  // fig1 is cheap and should succeed end to end
  const int good = std::system(
      (binary + " reproduce fig1 --seed 4 --out " + (dir / "fig1").string() +
       " >/dev/null 2>&1")
          .c_str());
  EXPECT_EQ(WEXITSTATUS(good), 0);
  EXPECT_TRUE(fs::exists(dir / "fig1" / "fig1_summary.json"));
  EXPECT_TRUE(fs::exists(dir / "fig1" / "resolved_config.json"));
}
#endif

}  // namespace
