#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "pencilkit/pencil_io.hpp"

using namespace pencilkit;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = PENCILKIT_FIXTURE_DIR;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string pencil(const char* name) {
  return (kFixtures / "pencils" / name).string();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "pencilkit_unit_cli";
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST(Cli, AnalyzeP1) {
  const auto r = run({"analyze", "--json", pencil("p1.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["defects"]["alpha"], json::array({1}));
  EXPECT_EQ(j["defects"]["regular"], true);
  EXPECT_TRUE(r.err.empty());
}

TEST(Cli, AnalyzeP4HasNoResolventMembers) {
  const auto r = run({"analyze", "--json", pencil("p4.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["defects"]["regular"], false);
  for (const auto& s : j["resolvent_samples"]) {
    EXPECT_EQ(s["member"], false);
  }
}

TEST(Cli, TextFormatAndOutFile) {
  const fs::path out = scratch() / "p3.json";
  const auto r = run({"analyze", "--json", pencil("p3.json"), "--format", "text", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("alpha (0,1)"), std::string::npos);
  EXPECT_EQ(read_json_file(out)["defects"]["alpha"], json::array({0, 1}));
}

TEST(Cli, MatrixMarketInput) {
  const auto r = run({"analyze", "--E", (kFixtures / "mtx" / "n3_E.mtx").string(), "--A",
                      (kFixtures / "mtx" / "n3_A.mtx").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["defects"]["alpha"], json::array({0, 0, 1}));
}

TEST(Cli, InputErrorsExitTwo) {
  const fs::path bad = scratch() / "bad.json";
  std::ofstream(bad) << "{not json";
  const auto r = run({"analyze", "--json", bad.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("parse error"), std::string::npos);
  EXPECT_EQ(run({"analyze"}).code, 2);
  EXPECT_EQ(run({"analyze", "--json", pencil("p1.json"), "--tol", "0"}).code, 2);
  EXPECT_EQ(run({"analyze", "--json", pencil("p1.json"), "--max-steps", "0"}).code, 2);
  EXPECT_EQ(run({"reduce", "--json", pencil("p1.json"), "--kind", "sideways"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"synth", "--blocks", "Q(1)"}).code, 2);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("analyze"), std::string::npos);
}

TEST(Cli, ReduceP3ByObservation) {
  const auto r = run({"reduce", "--json", pencil("p3.json"), "--kind", "obs", "--steps", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["reduced"]["m"], 1);
  EXPECT_EQ(j["reduced"]["E"], json::parse("[[0.0]]"));
  EXPECT_EQ(j["reduced"]["A"], json::parse("[[1.0]]"));
  EXPECT_EQ(j["domain_embedding"], json::parse("[[1.0], [0.0]]"));
}

TEST(Cli, ReduceZeroStepsCopies) {
  const auto r = run({"reduce", "--json", pencil("p4.json"), "--steps", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(pencil_from_json(j["reduced"]), load_pencil_json(pencil("p4.json")));
  EXPECT_TRUE(j["warnings"].empty());
}

TEST(Cli, ReduceIrreducibleWarns) {
  const auto r = run({"reduce", "--json", pencil("p2.json"), "--kind", "ctrl", "--steps", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["warnings"], json::array({"irreducible"}));
  EXPECT_EQ(pencil_from_json(j["reduced"]), load_pencil_json(pencil("p2.json")));
  EXPECT_NE(r.err.find("irreducible"), std::string::npos);
  EXPECT_EQ(r.err.find('{'), std::string::npos);
}

TEST(Cli, ReduceWritesMatrixMarket) {
  const fs::path dir = scratch() / "mtx";
  const auto r = run({"reduce", "--json", pencil("p5.json"), "--kind", "obs", "--steps", "2",
                      "--mtx-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"E.mtx", "A.mtx", "domain.mtx", "codomain.mtx"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
}

TEST(Cli, CommuteP3) {
  const auto r = run({"commute", "--json", pencil("p3.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["commutativity"]["equivalent"], true);
}

TEST(Cli, SpectrumSamplesAndCsv) {
  const fs::path csv = scratch() / "s.csv";
  const auto r = run({"spectrum", "--json", pencil("p2.json"), "--lambdas", "0,-1,1+2i",
                      "--grid", "-2:0:3,0:0:1", "--csv", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j["resolvent_samples"].size(), 6u);
  EXPECT_EQ(j["resolvent_samples"][0]["member"], true);
  EXPECT_EQ(j["resolvent_samples"][1]["member"], false);
  EXPECT_EQ(j["core_spectrum"].size(), 2u);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "re,im,sigma_min,threshold,member");
  EXPECT_EQ(run({"spectrum", "--json", pencil("p2.json"), "--grid", "1:2"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--json", pencil("p2.json"), "--lambdas", "1+x"}).code, 2);
}

TEST(Cli, SaddleTwoOne) {
  const auto r = run({"saddle", "--spec", (kFixtures / "saddle" / "two_one.json").string(),
                      "--infsup"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"beta\": 1.0"), std::string::npos);
  const auto s = run({"saddle", "--spec", (kFixtures / "saddle" / "two_one.json").string(),
                      "--solve", (kFixtures / "saddle" / "two_one_rhs.json").string(), "--ladder"});
  ASSERT_EQ(s.code, 0) << s.err;
  const json j = json::parse(s.out);
  EXPECT_EQ(j["saddle_solve"]["x"], json::parse("[1.0, 0.0]"));
  EXPECT_EQ(j["saddle_ladder"]["consistent"], true);
}

TEST(Cli, SynthN2IsP3) {
  const auto r = run({"synth", "--blocks", "N(2)"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(pencil_from_json(j), load_pencil_json(pencil("p3.json")));
  EXPECT_EQ(j["blocks"], "N(2)");
  const auto c = run({"synth", "--blocks", "J(1,2i)", "--seed", "3", "--scramble"});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(json::parse(c.out)["field"], "complex");
}

TEST(Cli, BatchMode) {
  const fs::path out = scratch() / "batch";
  fs::remove_all(out);
  const auto r = run({"analyze", "--batch", (kFixtures / "pencils").string(), "--out",
                      out.string(), "--jobs", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& entry : fs::directory_iterator(kFixtures / "pencils")) {
    const fs::path report = out / (entry.path().stem().string() + ".report.json");
    ASSERT_TRUE(fs::exists(report)) << report;
    const auto single = run({"analyze", "--json", entry.path().string()});
    std::ifstream in(report);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), single.out) << report;
  }
  EXPECT_EQ(run({"analyze", "--batch", (kFixtures / "pencils").string()}).code, 2);
}
