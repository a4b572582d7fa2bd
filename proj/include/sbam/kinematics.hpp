#pragma once

#include "sbam/error.hpp"
#include "sbam/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbam {

enum class JointType { Revolute, Prismatic };

/// One joint of a serial chain. `origin` is the fixed offset from the parent link frame;
/// the joint then rotates about (or slides along) `axis` in that frame. Limits are rad or mm.
struct JointSpec {
  std::string name;
  JointType type = JointType::Revolute;
  Vec3 axis = Vec3::UnitZ();
  double lo = -M_PI;
  double hi = M_PI;
  Pose origin;

  Pose motion(double q) const {
    if (type == JointType::Revolute) return Pose(Vec3::Zero(), Quat(Eigen::AngleAxisd(q, axis)));
    return Pose(q * axis, Quat::Identity());
  }

  void validate() const {
    if (!(lo < hi)) throw InputError("joint '" + name + "': lower limit must be below upper limit");
    if (std::abs(axis.norm() - 1.0) > 1e-9) throw InputError("joint '" + name + "': axis must be a unit vector");
  }
};

struct Chain {
  std::vector<JointSpec> joints;
  Pose tool;  // end-effector offset after the last joint
};

enum class Hand { Left, Right };

inline std::string to_string(Hand h) { return h == Hand::Left ? "left" : "right"; }

inline Hand parse_hand(std::string_view s) {
  if (s == "left") return Hand::Left;
  if (s == "right") return Hand::Right;
  throw InputError("unknown hand '" + std::string(s) + "'");
}

/// Bimanual robot: two serial chains hanging off a common base. Joint vectors list the
/// left chain first, then the right chain.
struct RobotModel {
  std::string name;
  Pose base;
  Chain left;
  Chain right;
  std::vector<double> neutral;

  std::size_t dof() const { return left.joints.size() + right.joints.size(); }

  const JointSpec& joint(std::size_t i) const {
    return i < left.joints.size() ? left.joints[i] : right.joints[i - left.joints.size()];
  }

  void validate() const {
    if (left.joints.empty() || right.joints.empty()) throw InputError("robot '" + name + "': chains must be non-empty");
    for (const auto& j : left.joints) j.validate();
    for (const auto& j : right.joints) j.validate();
    if (neutral.size() != dof()) throw InputError("robot '" + name + "': neutral posture has wrong dimension");
    for (std::size_t i = 0; i < dof(); ++i)
      if (neutral[i] < joint(i).lo || neutral[i] > joint(i).hi)
        throw InputError("robot '" + name + "': neutral posture violates limits of joint '" + joint(i).name + "'");
  }
};

struct EndEffectorPoses {
  Pose left;
  Pose right;

  const Pose& of(Hand h) const { return h == Hand::Left ? left : right; }
};

namespace detail {

inline Pose chain_fk(const Pose& base, const Chain& chain, std::span<const double> q) {
  Pose p = base;
  for (std::size_t i = 0; i < chain.joints.size(); ++i) {
    const auto& j = chain.joints[i];
    p = p * j.origin * j.motion(q[i]);
  }
  return p * chain.tool;
}

}  // namespace detail

inline EndEffectorPoses forward_kinematics(const RobotModel& model, std::span<const double> theta) {
  if (theta.size() != model.dof())
    throw std::invalid_argument("forward_kinematics: expected " + std::to_string(model.dof()) + " joints, got " +
                                std::to_string(theta.size()));
  const std::size_t nl = model.left.joints.size();
  return {detail::chain_fk(model.base, model.left, theta.first(nl)),
          detail::chain_fk(model.base, model.right, theta.subspan(nl))};
}

struct Grasp {
  Hand hand = Hand::Right;
  Pose transform;  // object frame expressed in the end-effector frame
};

using GraspAssignment = std::map<std::string, Grasp>;

inline void validate_grasps(const GraspAssignment& grasps) {
  int left = 0, right = 0;
  for (const auto& [id, g] : grasps) (g.hand == Hand::Left ? left : right)++;
  if (left > 1 || right > 1) throw InputError("at most one object may be grasped per hand");
}

/// Grasp that makes the hand hold `object_pose` when the robot is at `theta`.
inline Grasp grasp_holding(const RobotModel& model, std::span<const double> theta, Hand hand,
                           const Pose& object_pose) {
  const auto ee = forward_kinematics(model, theta);
  return {hand, ee.of(hand).inverse() * object_pose};
}

/// World poses of all objects: grasped ones follow their hand, static ones pass through.
inline std::map<std::string, Pose> object_poses(const RobotModel& model, std::span<const double> theta,
                                                const GraspAssignment& grasps,
                                                const std::map<std::string, Pose>& static_objects) {
  const auto ee = forward_kinematics(model, theta);
  std::map<std::string, Pose> out = static_objects;
  for (const auto& [id, g] : grasps) {
    if (static_objects.count(id)) throw InputError("object '" + id + "' is both static and grasped");
    out[id] = ee.of(g.hand) * g.transform;
  }
  return out;
}

struct ClampResult {
  std::vector<double> theta;
  std::vector<std::size_t> clamped;  // indices of components that were moved
};

inline ClampResult clamp_to_limits(const RobotModel& model, std::span<const double> theta) {
  ClampResult out{{theta.begin(), theta.end()}, {}};
  for (std::size_t i = 0; i < out.theta.size() && i < model.dof(); ++i) {
    const auto& j = model.joint(i);
    const double c = std::clamp(out.theta[i], j.lo, j.hi);
    if (c != out.theta[i]) {
      out.theta[i] = c;
      out.clamped.push_back(i);
    }
  }
  return out;
}

/// Sum of squared limit violations.
inline double limit_violation(const RobotModel& model, std::span<const double> theta) {
  double s = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const auto& j = model.joint(i);
    const double v = theta[i] < j.lo ? j.lo - theta[i] : (theta[i] > j.hi ? theta[i] - j.hi : 0.0);
    s += v * v;
  }
  return s;
}

}  // namespace sbam
