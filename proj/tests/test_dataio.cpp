#include "sbam/json_io.hpp"
#include "sbam/pipeline.hpp"
#include "sbam/synth.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace sbam {
namespace {

namespace fs = std::filesystem;

class DataIo : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sbam_dataio_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const fs::path& p, const std::string& text) { io::write_text_file(p, text); }

  fs::path dir_;
};

synth::SynthConfig small_config() {
  synth::SynthConfig cfg;
  cfg.n_demos = 3;
  cfg.duration = 4.0;
  return cfg;
}

TEST_F(DataIo, DemonstrationRoundTrip) {
  const auto demos = synth::synth_pour(small_config());
  io::save_demonstration(dir_ / "d.json", demos[0]);
  const auto back = io::load_demonstration(dir_ / "d.json");
  ASSERT_EQ(back.frames.size(), demos[0].frames.size());
  EXPECT_EQ(back.objects, demos[0].objects);
  EXPECT_EQ(back.ground_truth_keypoints, demos[0].ground_truth_keypoints);
  for (std::size_t f = 0; f < back.frames.size(); ++f)
    for (std::size_t o = 0; o < back.objects.size(); ++o) {
      EXPECT_LT(translation_distance(back.frames[f].poses[o], demos[0].frames[f].poses[o]), 1e-9);
      EXPECT_LT(rotation_distance(back.frames[f].poses[o], demos[0].frames[f].poses[o]), 1e-9);
    }
  io::save_demonstration(dir_ / "e.json", back);
  EXPECT_EQ(slurp(dir_ / "d.json"), slurp(dir_ / "e.json"));
}

TEST_F(DataIo, SbamLoadSaveIdentity) {
  const auto demos = synth::synth_pour(small_config());
  for (auto kind : {ConstraintKind::Cartesian, ConstraintKind::Cylindrical, ConstraintKind::Symbolic}) {
    const Sbam m = learn_sbam(demos, kind, default_symbolic_defs()).sbam;
    io::save_sbam(dir_ / "a.json", m);
    const Sbam back = io::load_sbam(dir_ / "a.json");
    EXPECT_EQ(back.kind, m.kind);
    EXPECT_EQ(back.global_keypoints, m.global_keypoints);
    EXPECT_EQ(back.gcacots, m.gcacots);
    EXPECT_EQ(back.symbolic_defs, m.symbolic_defs);
    EXPECT_EQ(back.objects, m.objects);
    io::save_sbam(dir_ / "b.json", back);
    EXPECT_EQ(slurp(dir_ / "a.json"), slurp(dir_ / "b.json")) << to_string(kind);
  }
}

TEST_F(DataIo, BundledInputsLoad) {
  const std::string data = SBAM_DATA_DIR;
  EXPECT_EQ(io::load_symbolic_defs(data + "/ssac_default.json"), default_symbolic_defs());
  for (const char* s : {"pour_humanoid", "pour_dual_arm", "roll_humanoid", "roll_dual_arm"}) {
    const auto scene = io::load_scene(data + "/scenes/" + s + ".json");
    EXPECT_NO_THROW(scene.validate());
    const auto robot = io::load_robot(fs::path(data) / "scenes" / scene.robot);
    EXPECT_NO_THROW(robot.validate());
    EXPECT_NO_THROW(resolve_scene(scene, robot, robot.neutral));
  }
}

TEST_F(DataIo, RobotAndSceneRoundTrip) {
  const std::string data = SBAM_DATA_DIR;
  const auto robot = io::load_robot(data + "/robots/humanoid_2x7.json");
  write(dir_ / "r.json", io::dump(io::to_json(robot)));
  const auto robot2 = io::load_robot(dir_ / "r.json");
  EXPECT_EQ(io::dump(io::to_json(robot2)), io::dump(io::to_json(robot)));
  const auto scene = io::load_scene(data + "/scenes/pour_humanoid.json");
  write(dir_ / "s.json", io::dump(io::to_json(scene)));
  EXPECT_EQ(io::load_scene(dir_ / "s.json"), scene);
}

TEST_F(DataIo, ConfigRoundTrip) {
  LearningConfig lc;
  lc.segmentation.eps_rel = 0.005;
  lc.keypoints.bins = 100;
  LearningConfig lc2;
  io::update_from_json(lc2, io::to_json(lc), "cfg");
  EXPECT_EQ(io::dump(io::to_json(lc2)), io::dump(io::to_json(lc)));
  ExecutorConfig ec;
  ec.c_d = 0.7;
  ec.restarts = 5;
  ExecutorConfig ec2;
  io::update_from_json(ec2, io::to_json(ec), "cfg");
  EXPECT_EQ(io::dump(io::to_json(ec2)), io::dump(io::to_json(ec)));
  EXPECT_THROW(io::update_from_json(ec2, io::Json::parse(R"({"c_q": 1})"), "cfg"), InputError);
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST_F(DataIo, ErrorsNameTheOffendingField) {
  const auto demos = synth::synth_pour(small_config());
  auto j = io::to_json(demos[0]);
  j["frames"][3]["t"] = "soon";
  write(dir_ / "bad.json", io::dump(j));
  const std::string msg = error_of([&] { io::load_demonstration(dir_ / "bad.json"); });
  EXPECT_NE(msg.find("frames[3].t"), std::string::npos) << msg;

  j = io::to_json(demos[0]);
  j["schema"] = "sbam/model";
  write(dir_ / "bad2.json", io::dump(j));
  EXPECT_THROW(io::load_demonstration(dir_ / "bad2.json"), InputError);

  write(dir_ / "bad3.json", "{ not json");
  EXPECT_ANY_THROW(io::load_demonstration(dir_ / "bad3.json"));
  EXPECT_THROW(io::load_demonstration(dir_ / "missing.json"), InputError);
}

TEST_F(DataIo, NonMonotonicTimestampsAreRejected) {
  const auto demos = synth::synth_pour(small_config());
  auto j = io::to_json(demos[0]);
  j["frames"][5]["t"] = j["frames"][4]["t"];
  write(dir_ / "bad.json", io::dump(j));
  EXPECT_THROW(io::load_demonstration(dir_ / "bad.json"), InputError);
}

TEST_F(DataIo, ExecutionSerializationAndCsv) {
  ExecutionResult r;
  r.kind = ConstraintKind::Cartesian;
  r.joint_names = {"left/a", "right/b"};
  KeypointSolution kp;
  kp.t = 0.5;
  kp.theta = {0.25, -1.0};
  kp.object_poses["cup"] = Pose::translation(1, 2, 3);
  kp.breakdown = {1.0, 2.0, 3.0, 6.0};
  r.keypoints.push_back(kp);
  r.trajectory = {{0.0, {0.0, 0.0}}, {5.0, {0.25, -1.0}}};
  const auto j = io::to_json(r);
  EXPECT_EQ(j["schema"], "sbam/execution");
  EXPECT_EQ(j["keypoints"][0]["objective"]["total"], 6.0);
  const std::string csv = io::trajectory_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,left/a,right/b");
  EXPECT_NE(csv.find("5,0.25,-1"), std::string::npos) << csv;
}

}  // namespace
}  // namespace sbam
