#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aos/cli.hpp"
#include "aos/error.hpp"
#include "aos/io.hpp"
#include "aos/render.hpp"
#include "aos/service.hpp"
#include "test_support.hpp"

using namespace aos;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  const io::Bytes b = io::read_file(p);
  return std::string(b.begin(), b.end());
}

// Small stacks keep the CLI tests fast.
std::vector<std::string> small_simulate(const std::string& scene, const std::filesystem::path& out) {
  return {"simulate", "--scene", scene, "--out", out.string(), "--width", "160", "--height", "128"};
}

}  // namespace

TEST(ParseGrid, ListsAndRanges) {
  EXPECT_EQ(cli::parse_grid("0.5,1,2"), (std::vector<double>{0.5, 1.0, 2.0}));
  EXPECT_EQ(cli::parse_grid("0:2:0.5"), (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
  EXPECT_EQ(cli::parse_grid("3"), (std::vector<double>{3.0}));
  EXPECT_THROW(cli::parse_grid(""), ValidationError);
  EXPECT_THROW(cli::parse_grid("1,x"), ValidationError);
  EXPECT_THROW(cli::parse_grid("0:1:0"), ValidationError);
}

TEST(Cli, HelpAndUnknownCommand) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"stereo", "--help"}).code, 0);
  const Result r = run({"frobnicate"});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_EQ(r.err.rfind("error:", 0), 0u);
}

TEST(Cli, SimulateIsByteIdenticalAcrossRuns) {
  test::TempDir a, b;
  ASSERT_EQ(run(small_simulate("preset3", a.path())).code, 0);
  ASSERT_EQ(run(small_simulate("preset3", b.path())).code, 0);
  for (const char* f : {"frame_0000.png", "frame_0014.png", "frame_0028.png", "poses.txt", "scene.yaml"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const json prov = json::parse(slurp(a / "simulate.json"));
  EXPECT_EQ(prov["command"], "simulate");
  EXPECT_EQ(prov["outputs"]["frames"], 29);
}

TEST(Cli, SimulateErrors) {
  EXPECT_EQ(run(small_simulate("preset3", "/nonexistent/aos/out")).code, cli::kExitIo);
  test::TempDir d;
  EXPECT_EQ(run(small_simulate("preset7", d.path())).code, cli::kExitValidation);
  EXPECT_EQ(run({"simulate", "--out", d.path().string(), "--spacing", "0"}).code, cli::kExitValidation);
  EXPECT_EQ(run({"simulate", "--out", d.path().string(), "--width", "abc"}).code, cli::kExitValidation);
}

TEST(Cli, SimulateFromSceneFile) {
  test::TempDir d;
  std::ofstream(d / "scene.in.yaml") << "preset: preset1\nseed: 3\n";
  std::filesystem::create_directories(d / "out");
  ASSERT_EQ(run(small_simulate((d / "scene.in.yaml").string(), d / "out")).code, 0);
  EXPECT_EQ(io::read_stack(d / "out").ground_truth->spec().seed, 3u);
}

TEST(Cli, IntegrateIdentityAndSidecar) {
  test::TempDir d;
  ASSERT_EQ(run(small_simulate("preset1", d.path())).code, 0);
  const auto png = d / "a0.png";
  const Result r = run({"integrate", "--stack", d.path().string(), "--out", png.string(), "--a", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(png), slurp(d / "frame_0014.png"));
  const json side = json::parse(slurp(d / "a0.json"));
  EXPECT_EQ(side["key"], "integral:u=20000:a=0:h=26000");
}

TEST(Cli, IntegrateOutsidePathIsValidation) {
  test::TempDir d;
  ASSERT_EQ(run(small_simulate("preset1", d.path())).code, 0);
  const Result r = run({"integrate", "--stack", d.path().string(), "--out", (d / "x.png").string(), "--u", "40"});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("constraint"), std::string::npos);
  EXPECT_EQ(run({"integrate", "--stack", "/nonexistent/s", "--out", (d / "x.png").string()}).code, cli::kExitIo);
}

TEST(Cli, StereoInfeasibleBaselineExitsTwo) {
  test::TempDir d;
  ASSERT_EQ(run(small_simulate("preset1", d.path())).code, 0);
  std::filesystem::create_directories(d / "st");
  const Result r =
      run({"stereo", "--stack", d.path().string(), "--out", (d / "st").string(), "--ef", "14", "--a", "2"});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("e_f <= 12 m"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(d / "st" / "sbs.png"));
}

TEST(Cli, StereoOutputsMatchService) {
  test::TempDir data;
  std::filesystem::create_directories(data / "s1");
  ASSERT_EQ(run(small_simulate("preset3", data / "s1")).code, 0);
  test::TempDir out;
  const Result r = run({"stereo", "--stack", (data / "s1").string(), "--out", out.path().string(), "--ef", "1.5",
                        "--a", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("target 0"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(out / "disparity.csv"));

  service::ViewerService svc(service::load_stacks(data.path()), 8);
  service::Request req;
  req.path = "/stacks/s1/stereo";
  req.query = {{"ef", "1.5"}, {"a", "2"}, {"mode", "sbs"}};
  EXPECT_EQ(svc.handle(req).body, slurp(out / "sbs.png"));
  req.query["mode"] = "anaglyph";
  EXPECT_EQ(svc.handle(req).body, slurp(out / "anaglyph.png"));

  const auto png = out.path() / "integral.png";
  ASSERT_EQ(run({"integrate", "--stack", (data / "s1").string(), "--out", png.string(), "--a", "6", "--h", "24.2"})
                .code,
            0);
  req.path = "/stacks/s1/integral";
  req.query = {{"a", "6"}, {"h", "24.2"}};
  EXPECT_EQ(svc.handle(req).body, slurp(png));
}

TEST(Cli, PerceptionCsvAndSummary) {
  const Result r = run({"perception", "--ht", "1.8", "--grid-ef", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1.8,1,-0.00814112,-11.2615,0.187692,0.27662,0.164015,1,1"), std::string::npos);
  const Result s = run({"perception", "--summary"});
  EXPECT_NE(s.out.find("JDDI 0.164015 m"), std::string::npos);
  EXPECT_EQ(run({"perception", "--ht", "30"}).code, cli::kExitValidation);
  EXPECT_EQ(run({"perception", "--out", "/nonexistent/dir/p.csv"}).code, cli::kExitIo);
}

TEST(Cli, ConfigFileWithCommandLinePrecedence) {
  test::TempDir d;
  std::ofstream(d / "p.yaml") << "ht: [1.8]\ngrid-ef: [1, 2]\nsummary: false\n";
  const Result r = run({"perception", "--config", (d / "p.yaml").string(), "--grid-ef", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n1.8,4,"), std::string::npos);
  EXPECT_EQ(r.out.find("\n1.8,2,"), std::string::npos);
  std::ofstream(d / "bad.yaml") << "bogus: 1\n";
  EXPECT_EQ(run({"perception", "--config", (d / "bad.yaml").string()}).code, cli::kExitValidation);
  EXPECT_EQ(run({"perception", "--config", (d / "missing.yaml").string()}).code, cli::kExitIo);
}

TEST(Cli, SweepMarksInfeasibleAndReportsArgmax) {
  test::TempDir d;
  ASSERT_EQ(run({"simulate", "--scene", "preset1", "--out", d.path().string()}).code, 0);
  const Result r = run({"sweep", "--stack", d.path().string(), "--metric", "suppression", "--grid-ef", "1,13",
                        "--grid-a", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("suppression,13,2,infeasible,0"), std::string::npos);
  EXPECT_NE(r.out.find("argmax suppression: e_f=1"), std::string::npos);
  EXPECT_EQ(run({"sweep", "--stack", d.path().string(), "--metric", "nope"}).code, cli::kExitValidation);
}

TEST(Cli, SweepWithoutGroundTruthExitsTwo) {
  test::TempDir d;
  ASSERT_EQ(run(small_simulate("preset1", d.path())).code, 0);
  std::filesystem::remove(d / io::kSceneFile);
  EXPECT_EQ(run({"sweep", "--stack", d.path().string()}).code, cli::kExitValidation);
}

TEST(Cli, PlaneSweepWritesOutputs) {
  test::TempDir d;
  ASSERT_EQ(run(small_simulate("preset1", d.path())).code, 0);
  std::filesystem::create_directories(d / "ps");
  const Result r = run({"planesweep", "--stack", d.path().string(), "--out", (d / "ps").string(), "--depth-min",
                        "20", "--step", "0.2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(d / "ps" / "depth.png"));
  EXPECT_TRUE(std::filesystem::exists(d / "ps" / "score.png"));
  EXPECT_TRUE(std::filesystem::exists(d / "ps" / "planesweep.json"));
  EXPECT_EQ(run({"planesweep", "--stack", d.path().string(), "--out", (d / "ps").string(), "--depth-max", "40"})
                .code,
            cli::kExitValidation);
}

TEST(Cli, ServeWithMissingDataDirExitsThree) {
  EXPECT_EQ(run({"serve", "--data", "/nonexistent/aos/data", "--port", "0"}).code, cli::kExitIo);
}
