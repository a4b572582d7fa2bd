#pragma once

// JSON documents: demonstration, scene, robot model, symbolic constraint set and SBAM.
// Every document carries {"schema": <name>, "version": 1}; keys are written in a fixed
// order so files diff cleanly and re-serialize byte-identically.

#include "sbam/constraints.hpp"
#include "sbam/demonstration.hpp"
#include "sbam/error.hpp"
#include "sbam/executor.hpp"
#include "sbam/kinematics.hpp"
#include "sbam/learning.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace sbam::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

inline std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) throw InputError(where + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<double> numbers(const Json& j, const std::string& where, std::size_t expected = 0) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  if (expected && j.size() != expected)
    throw InputError(where + ": expected " + std::to_string(expected) + " values");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline void check_header(const Json& j, const std::string& schema, const std::string& where) {
  if (text(field(j, "schema", where), where + ".schema") != schema)
    throw InputError(where + ": expected schema '" + schema + "'");
  const Json& v = field(j, "version", where);
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    throw InputError(where + ": unsupported schema version " + v.dump());
}

/// Rejects keys of `j` that `known` does not have.
inline void check_keys(const Json& j, const Json& known, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw InputError(where + ": unknown key '" + key + "'");
}

inline Json header(const std::string& schema) {
  Json j;
  j["schema"] = schema;
  j["version"] = kSchemaVersion;
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Primitive values

inline Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Json to_json(const Quat& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

inline Json to_json(const Pose& p) {
  Json j;
  j["position"] = to_json(p.position);
  j["orientation"] = to_json(p.orientation);
  return j;
}

inline Vec3 vec3_from_json(const Json& j, const std::string& where) {
  const auto v = detail::numbers(j, where, 3);
  return {v[0], v[1], v[2]};
}

/// Unit quaternions are kept bit-exact; anything visibly off unit norm is renormalized.
inline Quat quat_from_json(const Json& j, const std::string& where) {
  const auto v = detail::numbers(j, where, 4);
  Quat q(v[0], v[1], v[2], v[3]);
  const double norm = q.norm();
  if (!(norm > 0.0)) throw InputError(where + ": zero quaternion");
  if (std::abs(norm - 1.0) > 1e-12) q.normalize();
  return q;
}

inline Pose pose_from_json(const Json& j, const std::string& where) {
  Pose p;
  p.position = vec3_from_json(detail::field(j, "position", where), where + ".position");
  p.orientation = j.contains("orientation") ? quat_from_json(j.at("orientation"), where + ".orientation")
                                            : Quat::Identity();
  return p;
}

inline Json to_json(const ObjectDecl& obj) {
  Json j;
  j["id"] = obj.id;
  Json regions = Json::array();
  for (const auto& r : obj.regions) {
    Json rj;
    rj["name"] = r.name;
    rj["center"] = to_json(r.local_center);
    rj["orientation"] = to_json(r.local_orientation);
    rj["radii"] = to_json(r.radii);
    regions.push_back(rj);
  }
  j["regions"] = regions;
  return j;
}

inline ObjectDecl object_from_json(const Json& j, const std::string& where) {
  ObjectDecl obj;
  obj.id = detail::text(detail::field(j, "id", where), where + ".id");
  const Json& regions = detail::field(j, "regions", where);
  if (!regions.is_array()) throw InputError(where + ".regions: expected an array");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string rw = where + ".regions[" + std::to_string(i) + "]";
    AffordanceRegion r;
    r.object = obj.id;
    r.name = detail::text(detail::field(regions[i], "name", rw), rw + ".name");
    r.local_center = vec3_from_json(detail::field(regions[i], "center", rw), rw + ".center");
    if (regions[i].contains("orientation"))
      r.local_orientation = quat_from_json(regions[i].at("orientation"), rw + ".orientation");
    if (regions[i].contains("radii")) r.radii = vec3_from_json(regions[i].at("radii"), rw + ".radii");
    obj.regions.push_back(r);
  }
  return obj;
}

// ---------------------------------------------------------------------------
// Demonstration

inline Json to_json(const DemonstrationRecording& d) {
  Json j = detail::header("sbam/demonstration");
  j["task"] = d.task;
  Json objects = Json::array();
  for (const auto& o : d.objects) objects.push_back(to_json(o));
  j["objects"] = objects;
  if (!d.ground_truth_keypoints.empty()) j["ground_truth_keypoints"] = d.ground_truth_keypoints;
  Json frames = Json::array();
  for (const auto& f : d.frames) {
    Json fj;
    fj["t"] = f.timestamp;
    Json poses;
    for (std::size_t i = 0; i < d.objects.size(); ++i) poses[d.objects[i].id] = to_json(f.poses[i]);
    fj["poses"] = poses;
    frames.push_back(fj);
  }
  j["frames"] = frames;
  return j;
}

inline DemonstrationRecording demonstration_from_json(const Json& j, const std::string& where = "demonstration") {
  detail::check_header(j, "sbam/demonstration", where);
  DemonstrationRecording d;
  if (j.contains("task")) d.task = detail::text(j.at("task"), where + ".task");
  const Json& objects = detail::field(j, "objects", where);
  if (!objects.is_array()) throw InputError(where + ".objects: expected an array");
  for (std::size_t i = 0; i < objects.size(); ++i)
    d.objects.push_back(object_from_json(objects[i], where + ".objects[" + std::to_string(i) + "]"));
  if (j.contains("ground_truth_keypoints"))
    d.ground_truth_keypoints = detail::numbers(j.at("ground_truth_keypoints"), where + ".ground_truth_keypoints");
  const Json& frames = detail::field(j, "frames", where);
  if (!frames.is_array()) throw InputError(where + ".frames: expected an array");
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const std::string fw = "frames[" + std::to_string(f) + "]";
    Frame frame;
    frame.timestamp = detail::number(detail::field(frames[f], "t", fw), fw + ".t");
    const Json& poses = detail::field(frames[f], "poses", fw);
    for (const auto& obj : d.objects) {
      if (!poses.contains(obj.id)) throw InputError(fw + ".poses: missing object '" + obj.id + "'");
      frame.poses.push_back(pose_from_json(poses.at(obj.id), fw + ".poses." + obj.id));
    }
    if (poses.size() != d.objects.size()) throw InputError(fw + ".poses: undeclared object");
    d.frames.push_back(std::move(frame));
  }
  d.validate();
  return d;
}

inline DemonstrationRecording load_demonstration(const std::filesystem::path& path) {
  try {
    return demonstration_from_json(read_json_file(path));
  } catch (const InputError& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

inline void save_demonstration(const std::filesystem::path& path, const DemonstrationRecording& d) {
  write_text_file(path, dump(to_json(d)));
}

// ---------------------------------------------------------------------------
// Symbolic constraint set

inline Json to_json(const SymbolicConstraintDef& d) {
  Json j;
  j["name"] = d.name;
  j["mu_rho"] = d.mu_rho;
  j["var_rho"] = d.var_rho;
  j["mu_phi"] = d.mu_phi;
  j["kappa_phi"] = d.kappa_phi;
  j["mu_z"] = d.mu_z;
  j["var_z"] = d.var_z;
  return j;
}

inline SymbolicConstraintDef symbolic_def_from_json(const Json& j, const std::string& where) {
  using detail::field;
  using detail::number;
  SymbolicConstraintDef d;
  d.name = detail::text(field(j, "name", where), where + ".name");
  d.mu_rho = number(field(j, "mu_rho", where), where + ".mu_rho");
  d.var_rho = number(field(j, "var_rho", where), where + ".var_rho");
  d.mu_phi = wrap_angle(number(field(j, "mu_phi", where), where + ".mu_phi"));
  d.kappa_phi = number(field(j, "kappa_phi", where), where + ".kappa_phi");
  d.mu_z = number(field(j, "mu_z", where), where + ".mu_z");
  d.var_z = number(field(j, "var_z", where), where + ".var_z");
  d.validate();
  return d;
}

inline Json symbolic_set_to_json(const std::vector<SymbolicConstraintDef>& defs) {
  Json j = detail::header("sbam/symbolic_constraints");
  Json arr = Json::array();
  for (const auto& d : defs) arr.push_back(to_json(d));
  j["constraints"] = arr;
  return j;
}

inline std::vector<SymbolicConstraintDef> symbolic_set_from_json(const Json& j,
                                                                 const std::string& where = "symbolic_constraints") {
  detail::check_header(j, "sbam/symbolic_constraints", where);
  const Json& arr = detail::field(j, "constraints", where);
  if (!arr.is_array() || arr.empty()) throw InputError(where + ".constraints: expected a non-empty array");
  std::vector<SymbolicConstraintDef> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(symbolic_def_from_json(arr[i], where + ".constraints[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<SymbolicConstraintDef> load_symbolic_defs(const std::filesystem::path& path) {
  return symbolic_set_from_json(read_json_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Robot model

inline Json to_json(const Chain& c) {
  Json j;
  Json joints = Json::array();
  for (const auto& jt : c.joints) {
    Json jj;
    jj["name"] = jt.name;
    jj["type"] = jt.type == JointType::Revolute ? "revolute" : "prismatic";
    jj["axis"] = to_json(jt.axis);
    jj["limits"] = Json::array({jt.lo, jt.hi});
    jj["origin"] = to_json(jt.origin);
    joints.push_back(jj);
  }
  j["joints"] = joints;
  j["tool"] = to_json(c.tool);
  return j;
}

inline Json to_json(const RobotModel& m) {
  Json j = detail::header("sbam/robot");
  j["name"] = m.name;
  j["base"] = to_json(m.base);
  j["left"] = to_json(m.left);
  j["right"] = to_json(m.right);
  j["neutral"] = m.neutral;
  return j;
}

inline Chain chain_from_json(const Json& j, const std::string& where) {
  Chain c;
  const Json& joints = detail::field(j, "joints", where);
  if (!joints.is_array()) throw InputError(where + ".joints: expected an array");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const std::string jw = where + ".joints[" + std::to_string(i) + "]";
    JointSpec js;
    js.name = joints[i].contains("name") ? detail::text(joints[i].at("name"), jw + ".name") : jw;
    const std::string type = detail::text(detail::field(joints[i], "type", jw), jw + ".type");
    if (type == "revolute") js.type = JointType::Revolute;
    else if (type == "prismatic") js.type = JointType::Prismatic;
    else throw InputError(jw + ".type: unknown joint type '" + type + "'");
    js.axis = vec3_from_json(detail::field(joints[i], "axis", jw), jw + ".axis");
    const auto lim = detail::numbers(detail::field(joints[i], "limits", jw), jw + ".limits", 2);
    js.lo = lim[0];
    js.hi = lim[1];
    if (joints[i].contains("origin")) js.origin = pose_from_json(joints[i].at("origin"), jw + ".origin");
    js.validate();
    c.joints.push_back(js);
  }
  if (j.contains("tool")) c.tool = pose_from_json(j.at("tool"), where + ".tool");
  return c;
}

inline RobotModel robot_from_json(const Json& j, const std::string& where = "robot") {
  detail::check_header(j, "sbam/robot", where);
  RobotModel m;
  if (j.contains("name")) m.name = detail::text(j.at("name"), where + ".name");
  if (j.contains("base")) m.base = pose_from_json(j.at("base"), where + ".base");
  m.left = chain_from_json(detail::field(j, "left", where), where + ".left");
  m.right = chain_from_json(detail::field(j, "right", where), where + ".right");
  m.neutral = detail::numbers(detail::field(j, "neutral", where), where + ".neutral");
  m.validate();
  return m;
}

inline RobotModel load_robot(const std::filesystem::path& path) { return robot_from_json(read_json_file(path), path.string()); }

// ---------------------------------------------------------------------------
// Scene

inline Json to_json(const SceneSpec& s) {
  Json j = detail::header("sbam/scene");
  j["robot"] = s.robot;
  Json objects = Json::array();
  for (const auto& o : s.objects) {
    Json oj;
    oj["id"] = o.id;
    oj["pose"] = to_json(o.pose);
    if (o.hand) {
      Json g;
      g["hand"] = to_string(*o.hand);
      if (o.grasp) g["transform"] = to_json(*o.grasp);
      else g["transform"] = "auto";
      oj["grasp"] = g;
    }
    objects.push_back(oj);
  }
  j["objects"] = objects;
  return j;
}

inline SceneSpec scene_from_json(const Json& j, const std::string& where = "scene") {
  detail::check_header(j, "sbam/scene", where);
  SceneSpec s;
  if (j.contains("robot")) s.robot = detail::text(j.at("robot"), where + ".robot");
  const Json& objects = detail::field(j, "objects", where);
  if (!objects.is_array()) throw InputError(where + ".objects: expected an array");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string ow = where + ".objects[" + std::to_string(i) + "]";
    SceneObject o;
    o.id = detail::text(detail::field(objects[i], "id", ow), ow + ".id");
    if (objects[i].contains("pose")) o.pose = pose_from_json(objects[i].at("pose"), ow + ".pose");
    if (objects[i].contains("grasp") && !objects[i].at("grasp").is_null()) {
      const Json& g = objects[i].at("grasp");
      o.hand = parse_hand(detail::text(detail::field(g, "hand", ow + ".grasp"), ow + ".grasp.hand"));
      if (g.contains("transform") && !(g.at("transform").is_string() && g.at("transform") == "auto"))
        o.grasp = pose_from_json(g.at("transform"), ow + ".grasp.transform");
    }
    s.objects.push_back(o);
  }
  s.validate();
  return s;
}

inline SceneSpec load_scene(const std::filesystem::path& path) { return scene_from_json(read_json_file(path), path.string()); }

// ---------------------------------------------------------------------------
// SBAM

inline Json to_json(const LearningConfig& c) {
  Json j;
  j["eps_rel"] = c.segmentation.eps_rel;
  j["noise_floor"] = c.segmentation.noise_floor;
  j["gap_penalty"] = c.matching.gap_penalty;
  j["anchor_ends"] = c.matching.anchor_ends;
  j["spawn_unmatched"] = c.spawn_unmatched;
  j["include_same_object_pairs"] = c.include_same_object_pairs;
  j["histogram_bins"] = c.keypoints.bins;
  j["filter_order"] = c.keypoints.filter_order;
  j["filter_cutoff"] = c.keypoints.cutoff;
  j["peak_prominence"] = c.keypoints.prominence_frac;
  return j;
}

/// Reads the keys that are present and leaves the others untouched.
inline void update_from_json(LearningConfig& c, const Json& j, const std::string& where) {
  detail::check_keys(j, to_json(c), where);
  auto num = [&](const char* key, double& out) {
    if (j.contains(key)) out = detail::number(j.at(key), where + "." + key);
  };
  auto boolean = [&](const char* key, bool& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_boolean()) throw InputError(where + "." + key + ": expected a boolean");
    out = j.at(key).get<bool>();
  };
  auto integer = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer()) throw InputError(where + "." + key + ": expected an integer");
    out = j.at(key).get<int>();
  };
  num("eps_rel", c.segmentation.eps_rel);
  num("noise_floor", c.segmentation.noise_floor);
  num("gap_penalty", c.matching.gap_penalty);
  boolean("anchor_ends", c.matching.anchor_ends);
  boolean("spawn_unmatched", c.spawn_unmatched);
  boolean("include_same_object_pairs", c.include_same_object_pairs);
  integer("histogram_bins", c.keypoints.bins);
  integer("filter_order", c.keypoints.filter_order);
  num("filter_cutoff", c.keypoints.cutoff);
  num("peak_prominence", c.keypoints.prominence_frac);
}

inline Json to_json(const RegionRef& r) {
  Json j;
  j["object"] = r.object;
  j["region"] = r.region;
  return j;
}

inline RegionRef region_ref_from_json(const Json& j, const std::string& where) {
  return {detail::text(detail::field(j, "object", where), where + ".object"),
          detail::text(detail::field(j, "region", where), where + ".region")};
}

inline Json to_json(const Sbam& m) {
  Json j = detail::header("sbam/model");
  j["kind"] = to_string(m.kind);
  j["demo_count"] = m.demo_count;
  j["learning"] = to_json(m.config);
  if (m.kind == ConstraintKind::Symbolic) {
    Json defs = Json::array();
    for (const auto& d : m.symbolic_defs) defs.push_back(to_json(d));
    j["symbolic_constraints"] = defs;
  }
  Json objects = Json::array();
  for (const auto& o : m.objects) objects.push_back(to_json(o));
  j["objects"] = objects;
  j["global_keypoints"] = m.global_keypoints;
  Json gs = Json::array();
  for (const auto& g : m.gcacots) {
    Json gj;
    gj["pair"] = Json::array({to_json(g.pair.first), to_json(g.pair.second)});
    gj["dim"] = g.dim;
    gj["dimension"] = g.dimension;
    gj["angular"] = g.angular;
    Json kps = Json::array();
    for (const auto& kp : g.keypoints) {
      Json kj;
      kj["t"] = kp.t;
      kj["mean"] = kp.mean;
      kj["std"] = kp.stddev;
      kj["n"] = kp.n;
      kps.push_back(kj);
    }
    gj["keypoints"] = kps;
    gs.push_back(gj);
  }
  j["gcacots"] = gs;
  return j;
}

inline Sbam sbam_from_json(const Json& j, const std::string& where = "sbam") {
  using detail::field;
  detail::check_header(j, "sbam/model", where);
  Sbam m;
  m.kind = parse_constraint_kind(detail::text(field(j, "kind", where), where + ".kind"));
  m.demo_count = static_cast<int>(detail::number(field(j, "demo_count", where), where + ".demo_count"));
  if (j.contains("learning")) update_from_json(m.config, j.at("learning"), where + ".learning");
  if (m.kind == ConstraintKind::Symbolic) {
    const Json& defs = field(j, "symbolic_constraints", where);
    for (std::size_t i = 0; i < defs.size(); ++i)
      m.symbolic_defs.push_back(symbolic_def_from_json(defs[i], where + ".symbolic_constraints[" + std::to_string(i) + "]"));
  }
  const Json& objects = field(j, "objects", where);
  for (std::size_t i = 0; i < objects.size(); ++i)
    m.objects.push_back(object_from_json(objects[i], where + ".objects[" + std::to_string(i) + "]"));
  m.global_keypoints = detail::numbers(field(j, "global_keypoints", where), where + ".global_keypoints");
  for (std::size_t k = 1; k < m.global_keypoints.size(); ++k)
    if (!(m.global_keypoints[k] > m.global_keypoints[k - 1]))
      throw InputError(where + ".global_keypoints: must be strictly increasing");
  const Json& gs = field(j, "gcacots", where);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const std::string gw = where + ".gcacots[" + std::to_string(i) + "]";
    Gcacot g;
    g.kind = m.kind;
    const Json& pair = field(gs[i], "pair", gw);
    if (!pair.is_array() || pair.size() != 2) throw InputError(gw + ".pair: expected two regions");
    g.pair = {region_ref_from_json(pair[0], gw + ".pair[0]"), region_ref_from_json(pair[1], gw + ".pair[1]")};
    find_region(m.objects, g.pair.first);
    find_region(m.objects, g.pair.second);
    g.dim = static_cast<std::size_t>(detail::number(field(gs[i], "dim", gw), gw + ".dim"));
    g.dimension = detail::text(field(gs[i], "dimension", gw), gw + ".dimension");
    g.angular = field(gs[i], "angular", gw).get<bool>();
    const Json& kps = field(gs[i], "keypoints", gw);
    for (std::size_t k = 0; k < kps.size(); ++k) {
      const std::string kw = gw + ".keypoints[" + std::to_string(k) + "]";
      GcacotKeypoint kp;
      kp.t = detail::number(field(kps[k], "t", kw), kw + ".t");
      kp.mean = detail::number(field(kps[k], "mean", kw), kw + ".mean");
      kp.stddev = detail::number(field(kps[k], "std", kw), kw + ".std");
      kp.n = static_cast<int>(detail::number(field(kps[k], "n", kw), kw + ".n"));
      if (kp.stddev < 0.0 || kp.n < 1) throw InputError(kw + ": invalid std or count");
      if (!g.keypoints.empty() && !(kp.t > g.keypoints.back().t))
        throw InputError(kw + ".t: keypoint times must be strictly increasing");
      g.keypoints.push_back(kp);
    }
    m.gcacots.push_back(std::move(g));
  }
  return m;
}

inline Sbam load_sbam(const std::filesystem::path& path) { return sbam_from_json(read_json_file(path), path.string()); }

inline void save_sbam(const std::filesystem::path& path, const Sbam& m) { write_text_file(path, dump(to_json(m))); }

// ---------------------------------------------------------------------------
// Executor configuration and results

inline Json to_json(const ExecutorConfig& c) {
  Json j;
  j["c_h"] = c.c_h;
  j["c_d"] = c.c_d;
  j["c_lim"] = c.c_lim;
  j["tol_x"] = c.optimizer.tol_x;
  j["tol_f"] = c.optimizer.tol_f;
  j["max_iterations"] = c.optimizer.max_iterations;
  j["adaptive"] = c.optimizer.adaptive;
  j["initial_step_frac"] = c.initial_step_frac;
  j["restarts"] = c.restarts;
  j["warn_scale"] = c.warn_scale;
  j["duration"] = c.duration;
  j["sample_rate"] = c.sample_rate;
  j["min_support"] = c.min_support;
  return j;
}

inline void update_from_json(ExecutorConfig& c, const Json& j, const std::string& where) {
  detail::check_keys(j, to_json(c), where);
  auto num = [&](const char* key, double& out) {
    if (j.contains(key)) out = detail::number(j.at(key), where + "." + key);
  };
  auto integer = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer()) throw InputError(where + "." + key + ": expected an integer");
    out = j.at(key).get<int>();
  };
  num("c_h", c.c_h);
  num("c_d", c.c_d);
  num("c_lim", c.c_lim);
  num("tol_x", c.optimizer.tol_x);
  num("tol_f", c.optimizer.tol_f);
  integer("max_iterations", c.optimizer.max_iterations);
  if (j.contains("adaptive")) {
    if (!j.at("adaptive").is_boolean()) throw InputError(where + ".adaptive: expected a boolean");
    c.optimizer.adaptive = j.at("adaptive").get<bool>();
  }
  num("initial_step_frac", c.initial_step_frac);
  integer("restarts", c.restarts);
  num("warn_scale", c.warn_scale);
  num("duration", c.duration);
  num("sample_rate", c.sample_rate);
  num("min_support", c.min_support);
  c.validate();
}

inline Json to_json(const ExecutionResult& r) {
  Json j = detail::header("sbam/execution");
  j["kind"] = to_string(r.kind);
  j["joint_names"] = r.joint_names;
  Json kps = Json::array();
  for (const auto& kp : r.keypoints) {
    Json kj;
    kj["t"] = kp.t;
    kj["theta"] = kp.theta;
    Json poses;
    for (const auto& [id, p] : kp.object_poses) poses[id] = to_json(p);
    kj["object_poses"] = poses;
    Json b;
    b["t_s"] = kp.breakdown.t_s;
    b["t_h"] = kp.breakdown.t_h;
    b["t_d"] = kp.breakdown.t_d;
    b["total"] = kp.breakdown.total;
    kj["objective"] = b;
    kj["iterations"] = kp.iterations;
    kj["evaluations"] = kp.evaluations;
    kj["converged"] = kp.converged;
    kj["clamped"] = kp.clamped;
    kps.push_back(kj);
  }
  j["keypoints"] = kps;
  j["warnings"] = r.warnings;
  return j;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace detail

/// time, then one column per joint.
inline std::string trajectory_csv(const ExecutionResult& r) {
  std::string out = "time";
  for (const auto& n : r.joint_names) out += "," + n;
  out += "\n";
  for (const auto& s : r.trajectory) {
    out += detail::fmt(s.time);
    for (double q : s.theta) out += "," + detail::fmt(q);
    out += "\n";
  }
  return out;
}

inline std::string breakdown_csv(const ExecutionResult& r) {
  std::string out = "t,t_s,t_h,t_d,total,iterations,evaluations,converged\n";
  for (const auto& kp : r.keypoints) {
    out += detail::fmt(kp.t) + "," + detail::fmt(kp.breakdown.t_s) + "," + detail::fmt(kp.breakdown.t_h) + "," +
           detail::fmt(kp.breakdown.t_d) + "," + detail::fmt(kp.breakdown.total) + "," + std::to_string(kp.iterations) +
           "," + std::to_string(kp.evaluations) + "," + (kp.converged ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace sbam::io
