#pragma once

#include "sbam/error.hpp"
#include "sbam/geometry.hpp"
#include "sbam/kinematics.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace sbam {

struct Frame {
  double timestamp = 0.0;   // seconds
  std::vector<Pose> poses;  // one per declared object, same order

  bool operator==(const Frame&) const = default;
};

/// Object trajectories of one demonstration together with the region declarations.
struct DemonstrationRecording {
  std::string task;
  std::vector<ObjectDecl> objects;
  std::vector<Frame> frames;
  std::vector<double> ground_truth_keypoints;  // normalized times, optional

  bool operator==(const DemonstrationRecording&) const = default;

  std::size_t object_index(const std::string& id) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i].id == id) return i;
    throw InputError("unknown object '" + id + "'");
  }

  void validate() const {
    std::set<std::string> ids;
    for (const auto& obj : objects) {
      if (!ids.insert(obj.id).second) throw InputError("objects: duplicate object id '" + obj.id + "'");
      std::set<std::string> names;
      for (const auto& r : obj.regions) {
        if (!names.insert(r.name).second)
          throw InputError("objects: duplicate region '" + r.name + "' on object '" + obj.id + "'");
        if (r.object != obj.id) throw InputError("objects: region '" + r.name + "' names a different object");
        if ((r.radii.array() < 0.0).any())
          throw InputError("objects: region '" + r.name + "' has negative radii");
      }
    }
    if (frames.size() < 2) throw InputError("frames: need at least 2 frames");
    for (std::size_t f = 0; f < frames.size(); ++f) {
      if (frames[f].poses.size() != objects.size())
        throw InputError("frames[" + std::to_string(f) + "]: expected a pose for every object");
      if (f > 0 && !(frames[f].timestamp > frames[f - 1].timestamp))
        throw InputError("frames[" + std::to_string(f) + "].t: timestamps must be strictly increasing");
    }
  }

  /// Frame timestamps mapped affinely onto [0, 1].
  std::vector<double> normalized_times() const {
    std::vector<double> out;
    out.reserve(frames.size());
    const double t0 = frames.front().timestamp, span = frames.back().timestamp - t0;
    for (const auto& f : frames) out.push_back((f.timestamp - t0) / span);
    out.back() = 1.0;
    return out;
  }

  /// Pose of an object at normalized time s, interpolated between frames.
  Pose pose_at(std::size_t object, double s) const {
    const auto times = normalized_times();
    if (s <= 0.0) return frames.front().poses[object];
    if (s >= 1.0) return frames.back().poses[object];
    const auto hi = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), s) - times.begin());
    const std::size_t lo = hi - 1;
    const double u = (s - times[lo]) / (times[hi] - times[lo]);
    return interpolate(frames[lo].poses[object], frames[hi].poses[object], u);
  }
};

struct SceneObject {
  std::string id;
  Pose pose;                    // static pose, or initial pose of a grasped object
  std::optional<Hand> hand;     // set when the object is grasped
  std::optional<Pose> grasp;    // explicit grasp transform; derived from `pose` when absent

  bool operator==(const SceneObject&) const = default;
};

/// Initial scene for execution: static and grasped objects plus the robot to use.
struct SceneSpec {
  std::string robot;  // path of the robot model file, relative to the scene file
  std::vector<SceneObject> objects;

  bool operator==(const SceneSpec&) const = default;

  void validate() const {
    std::set<std::string> ids;
    std::set<Hand> hands;
    for (const auto& o : objects) {
      if (!ids.insert(o.id).second) throw InputError("scene: duplicate object id '" + o.id + "'");
      if (o.hand && !hands.insert(*o.hand).second)
        throw InputError("scene: more than one object assigned to the " + to_string(*o.hand) + " hand");
      if (o.grasp && !o.hand) throw InputError("scene: object '" + o.id + "' has a grasp transform but no hand");
    }
  }

  /// Copies the frame-0 object poses of a demonstration into the scene.
  SceneSpec with_initial_poses(const DemonstrationRecording& demo) const {
    SceneSpec out = *this;
    for (auto& o : out.objects) o.pose = demo.frames.front().poses[demo.object_index(o.id)];
    return out;
  }
};

/// Grasp transforms and static poses of a scene for a robot resting at `theta`.
struct ResolvedScene {
  GraspAssignment grasps;
  std::map<std::string, Pose> static_objects;
  std::map<std::string, Pose> initial_poses;
};

inline ResolvedScene resolve_scene(const SceneSpec& scene, const RobotModel& model, std::span<const double> theta) {
  scene.validate();
  ResolvedScene out;
  const auto ee = forward_kinematics(model, theta);
  for (const auto& o : scene.objects) {
    if (!o.hand) {
      out.static_objects[o.id] = o.pose;
      out.initial_poses[o.id] = o.pose;
      continue;
    }
    const Pose grasp = o.grasp ? *o.grasp : ee.of(*o.hand).inverse() * o.pose;
    out.grasps[o.id] = {*o.hand, grasp};
    out.initial_poses[o.id] = ee.of(*o.hand) * grasp;
  }
  validate_grasps(out.grasps);
  return out;
}

}  // namespace sbam
