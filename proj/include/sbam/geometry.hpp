#pragma once

#include <Eigen/Geometry>

#include <cmath>
#include <string>
#include <vector>

namespace sbam {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform. Positions are in millimeters.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Pose() = default;
  Pose(const Vec3& p, const Quat& q) : position(p), orientation(q.normalized()) {}

  static Pose identity() { return Pose(); }

  static Pose translation(double x, double y, double z) {
    return Pose(Vec3(x, y, z), Quat::Identity());
  }

  static Pose rotation(const Vec3& axis, double angle) {
    return Pose(Vec3::Zero(), Quat(Eigen::AngleAxisd(angle, axis.normalized())));
  }

  Vec3 apply(const Vec3& point) const { return position + orientation * point; }

  Pose inverse() const {
    const Quat inv = orientation.conjugate();
    return Pose(-(inv * position), inv);
  }

  Eigen::Matrix3d rotation_matrix() const { return orientation.toRotationMatrix(); }

  bool operator==(const Pose& other) const {
    return position == other.position && orientation.coeffs() == other.orientation.coeffs();
  }
};

/// parent * child. The orientation is renormalized to bound drift.
inline Pose compose(const Pose& parent, const Pose& child) {
  Pose out;
  out.position = parent.position + parent.orientation * child.position;
  out.orientation = (parent.orientation * child.orientation).normalized();
  return out;
}

inline Pose operator*(const Pose& parent, const Pose& child) { return compose(parent, child); }

/// Distance between two poses: translational (mm) and rotational (rad) parts.
inline double translation_distance(const Pose& a, const Pose& b) {
  return (a.position - b.position).norm();
}

inline double rotation_distance(const Pose& a, const Pose& b) {
  return a.orientation.angularDistance(b.orientation);
}

/// Linear position, spherical orientation interpolation.
inline Pose interpolate(const Pose& a, const Pose& b, double s) {
  return Pose(a.position + s * (b.position - a.position), a.orientation.slerp(s, b.orientation));
}

/// Object part approximated by an ellipse in the object frame. Only the center enters
/// the constraint math; orientation and radii are carried through I/O.
struct AffordanceRegion {
  std::string name;
  std::string object;
  Vec3 local_center = Vec3::Zero();
  Quat local_orientation = Quat::Identity();
  Vec3 radii = Vec3::Zero();

  bool operator==(const AffordanceRegion& other) const {
    return name == other.name && object == other.object && local_center == other.local_center &&
           local_orientation.coeffs() == other.local_orientation.coeffs() && radii == other.radii;
  }
};

/// An object and the affordance regions declared on it.
struct ObjectDecl {
  std::string id;
  std::vector<AffordanceRegion> regions;

  bool operator==(const ObjectDecl&) const = default;
};

inline Vec3 region_world_center(const Pose& object_pose, const AffordanceRegion& region) {
  return object_pose.apply(region.local_center);
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  double r = std::fmod(a + M_PI, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - M_PI;
}

}  // namespace sbam
