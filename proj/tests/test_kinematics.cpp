#include "sbam/json_io.hpp"
#include "sbam/kinematics.hpp"

#include <gtest/gtest.h>

#include <random>

namespace sbam {
namespace {

/// Two unit links rotating about z on each side, tool at the end of the second link.
RobotModel unit_planar() {
  RobotModel m;
  m.name = "unit planar";
  for (Chain* c : {&m.left, &m.right}) {
    c->joints = {{"j1", JointType::Revolute, Vec3::UnitZ(), -M_PI, M_PI, Pose()},
                 {"j2", JointType::Revolute, Vec3::UnitZ(), -M_PI, M_PI, Pose::translation(1, 0, 0)}};
    c->tool = Pose::translation(1, 0, 0);
  }
  m.neutral = {0, 0, 0, 0};
  return m;
}

TEST(Kinematics, PlanarTwoLinkReachesCorner) {
  const RobotModel m = unit_planar();
  const std::vector<double> q{M_PI / 2, -M_PI / 2, 0.0, 0.0};
  const auto ee = forward_kinematics(m, q);
  EXPECT_LT((ee.left.position - Vec3(1, 1, 0)).norm(), 1e-12);
  EXPECT_LT((ee.right.position - Vec3(2, 0, 0)).norm(), 1e-12);
  EXPECT_LT(rotation_distance(ee.left, Pose()), 1e-12);
}

TEST(Kinematics, PlanarMatchesClosedForm) {
  const RobotModel m = unit_planar();
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> q{u(rng), u(rng), u(rng), u(rng)};
    const auto ee = forward_kinematics(m, q);
    const Vec3 want(std::cos(q[2]) + std::cos(q[2] + q[3]), std::sin(q[2]) + std::sin(q[2] + q[3]), 0.0);
    EXPECT_LT((ee.right.position - want).norm(), 1e-12);
  }
}

TEST(Kinematics, PrismaticJointSlidesAlongAxis) {
  RobotModel m = unit_planar();
  m.right.joints[1] = {"slide", JointType::Prismatic, Vec3::UnitZ(), 0.0, 100.0, Pose::translation(1, 0, 0)};
  const auto ee = forward_kinematics(m, std::vector<double>{0, 0, 0, 25.0});
  EXPECT_LT((ee.right.position - Vec3(2, 0, 25)).norm(), 1e-12);
}

TEST(Kinematics, BaseTransformApplies) {
  RobotModel m = unit_planar();
  m.base = Pose(Vec3(10, 0, 0), Quat(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ())));
  const auto ee = forward_kinematics(m, m.neutral);
  EXPECT_LT((ee.left.position - Vec3(10, 2, 0)).norm(), 1e-12);
}

TEST(Kinematics, WrongJointCountThrows) {
  EXPECT_THROW(forward_kinematics(unit_planar(), std::vector<double>{0, 0}), std::invalid_argument);
}

TEST(Kinematics, GraspedObjectsFollowTheHand) {
  const RobotModel m = unit_planar();
  const Pose cup(Vec3(2.5, 0.0, 0.3), Quat::Identity());
  GraspAssignment grasps{{"cup", grasp_holding(m, m.neutral, Hand::Left, cup)}};
  const std::map<std::string, Pose> statics{{"table", Pose::translation(0, 0, -1)}};
  auto poses = object_poses(m, m.neutral, grasps, statics);
  EXPECT_LT(translation_distance(poses.at("cup"), cup), 1e-12);
  EXPECT_EQ(poses.at("table"), statics.at("table"));

  const std::vector<double> q{M_PI / 2, 0, 0, 0};
  poses = object_poses(m, q, grasps, statics);
  EXPECT_LT((poses.at("cup").position - Vec3(0.0, 2.5, 0.3)).norm(), 1e-12);

  grasps["table"] = {Hand::Right, Pose()};
  EXPECT_THROW(object_poses(m, q, grasps, statics), InputError);
}

TEST(Kinematics, OneObjectPerHand) {
  GraspAssignment g{{"a", {Hand::Left, Pose()}}, {"b", {Hand::Left, Pose()}}};
  EXPECT_THROW(validate_grasps(g), InputError);
  g["b"].hand = Hand::Right;
  EXPECT_NO_THROW(validate_grasps(g));
}

TEST(Kinematics, ClampAndViolation) {
  RobotModel m = unit_planar();
  m.left.joints[0].lo = -1.0;
  m.left.joints[0].hi = 1.0;
  const std::vector<double> q{1.5, 0.2, -4.0, 0.0};
  const auto c = clamp_to_limits(m, q);
  EXPECT_EQ(c.theta, (std::vector<double>{1.0, 0.2, -M_PI, 0.0}));
  EXPECT_EQ(c.clamped, (std::vector<std::size_t>{0, 2}));
  EXPECT_NEAR(limit_violation(m, q), 0.25 + (4.0 - M_PI) * (4.0 - M_PI), 1e-12);
}

TEST(Kinematics, ValidateCatchesBadModels) {
  RobotModel m = unit_planar();
  EXPECT_NO_THROW(m.validate());
  m.neutral = {0, 0, 0};
  EXPECT_THROW(m.validate(), InputError);
  m = unit_planar();
  m.left.joints[0].axis = Vec3(1, 1, 0);
  EXPECT_THROW(m.validate(), InputError);
  m = unit_planar();
  m.neutral[1] = 4.0;
  EXPECT_THROW(m.validate(), InputError);
}

TEST(Kinematics, BundledRobotsReachTheirNeutralHandPositions) {
  for (const char* name : {"humanoid_2x7", "dual_arm_2x7"}) {
    const RobotModel m = io::load_robot(std::string(SBAM_DATA_DIR) + "/robots/" + name + ".json");
    EXPECT_EQ(m.dof(), 14u);
    const auto ee = forward_kinematics(m, m.neutral);
    EXPECT_LT((ee.left.position - Vec3(450, 250, 60)).norm(), 1.0) << name;
    EXPECT_LT((ee.right.position - Vec3(450, -250, 125)).norm(), 1.0) << name;
  }
}

}  // namespace
}  // namespace sbam
