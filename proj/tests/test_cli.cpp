#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

// Black-box runs of the command-line tool. RIGIDITY_CLI, RIGIDITY_DATA and
// RIGIDITY_SCRATCH come from the build.

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string cli = RIGIDITY_CLI;
const fs::path data = RIGIDITY_DATA;

/// Per-test scratch directory; ctest may run the tests in parallel.
fs::path work() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  return fs::path(RIGIDITY_SCRATCH) / info->name();
}

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const fs::path out = work() / "stdout.txt";
  const std::string cmd = "RIGIDITY_LOG=error '" + cli + "' " + args + " > '" + out.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::remove_all(work());
    fs::create_directories(work());
  }
};

}  // namespace

TEST_F(Cli, ClassifySquare) {
  const auto r = run("classify " + q(data / "square.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["convex"].get<bool>());
  EXPECT_FALSE(j["strictly_convex"].get<bool>());
  EXPECT_EQ(j["n_segments"].get<int>(), 4);
}

TEST_F(Cli, MetricOnDisk) {
  const auto r = run("metric " + q(data / "disk.json") + " -n 4");
  ASSERT_EQ(r.code, 0);
  std::istringstream is(r.out);
  std::string header, row0;
  std::getline(is, header);
  std::getline(is, row0);
  std::istringstream cells(row0);
  std::string cell;
  std::vector<double> v;
  while (std::getline(cells, cell, ',')) v.push_back(std::stod(cell));
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_NEAR(v[1], std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(v[2], 2.0, 1e-9);
}

TEST_F(Cli, GeodesicAcrossReflexCorner) {
  const auto r = run("geodesic " + q(data / "lshape.json") + " --from 2 --to 6");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["length"].get<double>(), 2 * std::sqrt(2.0), 1e-9);
}

TEST_F(Cli, ClipSensitiveExitsThree) {
  EXPECT_EQ(run("geodesic " + q(data / "half_plane.json") + " --from 0.1 --to 1").code, 3);
  EXPECT_EQ(run("geodesic " + q(data / "half_plane.json") + " --from 8 --to 12").code, 0);
}

TEST_F(Cli, IdentityCheckPasses) {
  const fs::path corr = work() / "identity.json";
  std::ofstream(corr) << R"({"pairs":[{"u":0,"v":0,"orientation":1,"offset":0.0}]})";
  const auto r = run("check " + q(data / "smoothed_l.json") + " " + q(data / "smoothed_l.json") + " " + q(corr) + " -n 64");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["verdict"], "Pass");
  EXPECT_EQ(j["max_deviation"].get<double>(), 0.0);
  EXPECT_EQ(j["ladder"].size(), 4u);
}

TEST_F(Cli, Step5Pipeline) {
  const fs::path dir = work() / "step5";
  ASSERT_EQ(run("construct step5 --l 1 --out " + q(dir)).code, 0);
  for (const char* f : {"U.json", "V.json", "corr.json", "preview.svg"}) EXPECT_TRUE(fs::exists(dir / f)) << f;

  const auto check = run("check " + q(dir / "U.json") + " " + q(dir / "V.json") + " " + q(dir / "corr.json") + " -n 128");
  ASSERT_EQ(check.code, 0);
  EXPECT_EQ(json::parse(check.out)["verdict"], "Pass");

  const auto congruence = run("congruence " + q(dir / "U.json") + " " + q(dir / "V.json"));
  ASSERT_EQ(congruence.code, 0);
  EXPECT_FALSE(json::parse(congruence.out)["found"].get<bool>());

  auto corr = json::parse(slurp(dir / "corr.json"));
  corr["pairs"][0]["offset"] = corr["pairs"][0]["offset"].get<double>() + 0.05;
  std::ofstream(dir / "bad.json") << corr.dump();
  const auto bad = run("check " + q(dir / "U.json") + " " + q(dir / "V.json") + " " + q(dir / "bad.json") + " -n 128");
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(json::parse(bad.out)["verdict"], "Fail");
}

TEST_F(Cli, LengthMismatchFailsIntrinsically) {
  const fs::path corr = work() / "identity.json";
  std::ofstream(corr) << R"({"pairs":[{"u":0,"v":0,"orientation":1,"offset":0.0}]})";
  const auto r = run("check " + q(data / "square.json") + " " + q(data / "disk.json") + " " + q(corr));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.out)["verdict"], "Fail");
}

TEST_F(Cli, DeformAndConvexInput) {
  const fs::path dir = work() / "deform";
  ASSERT_EQ(run("construct deform --out " + q(dir)).code, 0);
  EXPECT_EQ(run("classify " + q(dir / "V.json")).code, 0);
  EXPECT_EQ(run("construct deform --domain " + q(data / "disk.json") + " --out " + q(work() / "nope")).code, 1);
}

TEST_F(Cli, Lemma41Solution) {
  const fs::path dir = work() / "lemma41";
  ASSERT_EQ(run("construct lemma41 --delta 1e-2 --out " + q(dir)).code, 0);
  const auto j = json::parse(slurp(dir / "solution.json"));
  EXPECT_LE(j["residual_norm"].get<double>(), 1e-10);
  EXPECT_EQ(j["jacobian"]["rank"].get<int>(), 3);
  EXPECT_TRUE(fs::exists(dir / "preview.svg"));

  const fs::path from_file = work() / "lemma41_file";
  ASSERT_EQ(run("construct lemma41 --problem " + q(data / "lemma41_problem.json") + " --out " + q(from_file)).code, 0);
}

TEST_F(Cli, CardioidFiles) {
  const fs::path dir = work() / "cardioid";
  ASSERT_EQ(run("construct cardioid --segments 12 --out " + q(dir)).code, 0);
  const auto j = json::parse(slurp(dir / "profile.json"));
  EXPECT_NEAR(j["slope_cardioid"].get<double>(), std::sqrt(5.0) / 7.0, 1e-9);
  EXPECT_NEAR(j["slope_circle"].get<double>(), std::sqrt(5.0) / 7.0, 1e-9);
  EXPECT_EQ(slurp(dir / "surface.stl").rfind("solid profile", 0), 0u);
}

TEST_F(Cli, InvalidInputs) {
  EXPECT_EQ(run("classify " + q(data / "missing.json")).code, 1);
  EXPECT_EQ(run("classify " + q(data / "invalid_figure_eight.json")).code, 1);
  EXPECT_EQ(run("classify " + q(data / "lemma41_problem.json")).code, 1);
  const fs::path corr = work() / "sideways.json";
  std::ofstream(corr) << R"({"pairs":[{"u":0,"v":0,"orientation":0,"offset":0.0}]})";
  EXPECT_EQ(run("check " + q(data / "square.json") + " " + q(data / "square.json") + " " + q(corr)).code, 1);
}

TEST_F(Cli, Deterministic) {
  for (const std::string args : {"metric " + q(data / "smoothed_l.json") + " -n 24 --seed 5", "classify " + q(data / "stadium.json"),
                                  "congruence " + q(data / "lshape.json") + " " + q(data / "lshape.json")}) {
    const auto a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out) << args;
  }
  ASSERT_EQ(run("construct step5 --l 1 --out " + q(work() / "s5a")).code, 0);
  ASSERT_EQ(run("construct step5 --l 1 --out " + q(work() / "s5b")).code, 0);
  for (const char* f : {"U.json", "V.json", "corr.json", "preview.svg"}) EXPECT_EQ(slurp(work() / "s5a" / f), slurp(work() / "s5b" / f)) << f;
}

TEST_F(Cli, EmittedDomainsReload) {
  ASSERT_EQ(run("construct step5 --l 0.5 --out " + q(work() / "rt")).code, 0);
  for (const char* f : {"U.json", "V.json"}) EXPECT_EQ(run("classify " + q(work() / "rt" / f)).code, 0) << f;
  for (const auto& entry : fs::recursive_directory_iterator(data)) {
    const auto name = entry.path().filename().string();
    if (name != "U.json" && name != "V.json") continue;
    EXPECT_EQ(run("classify " + q(entry.path())).code, 0) << entry.path();
  }
}
