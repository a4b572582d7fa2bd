#include "sbam/json_io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "sbam_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static int run(const std::string& args) {
    const std::string cmd = std::string(SBAM_CLI) + " " + args + " > " + (dir_ / "stdout.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::string demos(const std::string& sub) {
    std::string out;
    for (int d = 0; d < 3; ++d) out += " " + (dir_ / sub / ("demo_0" + std::to_string(d) + ".json")).string();
    return out;
  }

  static inline fs::path dir_;
};

TEST_F(Cli, SynthLearnExecuteInspect) {
  const std::string d = dir_.string();
  ASSERT_EQ(run("synth --task pour --demos 3 --duration 5 --out " + d + "/synth"), 0) << slurp(dir_ / "stdout.txt");
  EXPECT_TRUE(fs::exists(dir_ / "synth" / "manifest.json"));
  ASSERT_EQ(run("learn" + demos("synth") + " --kind cartesian --out " + d + "/learn"), 0);
  for (const char* f : {"sbam.json", "tracks.csv", "histogram.csv", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir_ / "learn" / f)) << f;
  const std::string scene = std::string(SBAM_DATA_DIR) + "/scenes/pour_humanoid.json";
  ASSERT_EQ(run("execute --sbam " + d + "/learn/sbam.json --scene " + scene + " --out " + d + "/exec"), 0)
      << slurp(dir_ / "stdout.txt");
  for (const char* f : {"execution.json", "trajectory.csv", "breakdown.csv"})
    EXPECT_TRUE(fs::exists(dir_ / "exec" / f)) << f;
  const auto manifest = sbam::io::read_json_file(dir_ / "exec" / "manifest.json");
  EXPECT_EQ(manifest["schema"], "sbam/manifest");
  EXPECT_EQ(manifest["command"], "execute");
  EXPECT_EQ(manifest["outputs"].size(), 3u);
  ASSERT_EQ(run("inspect " + d + "/learn/sbam.json"), 0);
  EXPECT_NE(slurp(dir_ / "stdout.txt").find("global keypoints:"), std::string::npos);
}

TEST_F(Cli, SeedControlsSynthesis) {
  const std::string d = dir_.string();
  ASSERT_EQ(run("--seed 5 synth --demos 1 --duration 2 --out " + d + "/s5a"), 0);
  ASSERT_EQ(run("--seed 5 synth --demos 1 --duration 2 --out " + d + "/s5b"), 0);
  ASSERT_EQ(run("--seed 6 synth --demos 1 --duration 2 --out " + d + "/s6"), 0);
  EXPECT_EQ(slurp(dir_ / "s5a" / "demo_00.json"), slurp(dir_ / "s5b" / "demo_00.json"));
  EXPECT_NE(slurp(dir_ / "s5a" / "demo_00.json"), slurp(dir_ / "s6" / "demo_00.json"));
}

TEST_F(Cli, ExitCodes) {
  const std::string d = dir_.string();
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("synth --task juggle"), 1);
  sbam::io::write_text_file(dir_ / "broken.json", "{\"schema\": \"sbam/model\"}");
  EXPECT_EQ(run("inspect " + d + "/broken.json"), 2);
  sbam::io::write_text_file(dir_ / "typo.json", "{\"executor\": {\"c_dd\": 1}}");
  EXPECT_EQ(run("--config " + d + "/typo.json synth --demos 1 --out " + d + "/typo"), 2);
  EXPECT_NE(slurp(dir_ / "stdout.txt").find("c_dd"), std::string::npos);
}

}  // namespace
