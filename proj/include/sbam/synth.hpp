#pragma once

// Scripted demonstrations of the pouring and rolling tasks. Motions are piecewise linear
// in normalized time with known corner times; every frame gets i.i.d. Gaussian position
// noise of sigma per axis and a small random rotation of sigma / 200 rad.

#include "sbam/demonstration.hpp"
#include "sbam/error.hpp"
#include "sbam/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace sbam::synth {

struct SynthConfig {
  int n_demos = 9;
  double noise_sigma = 5.0;  // mm
  std::uint64_t seed = 1;
  double duration = 10.0;    // s
  double rate = 30.0;        // frames per second

  void validate() const {
    if (n_demos < 1) throw InputError("synth: n_demos must be >= 1");
    if (!(noise_sigma >= 0.0)) throw InputError("synth: noise_sigma must be >= 0");
    if (!(duration > 0.0) || !(rate > 0.0)) throw InputError("synth: duration and rate must be > 0");
    if (duration * rate < 10.0) throw InputError("synth: fewer than 10 frames");
  }
};

/// Rotation noise per unit of position noise, rad / mm.
inline constexpr double kRotationNoisePerMm = 1.0 / 200.0;

namespace detail {

inline AffordanceRegion region(const std::string& object, const std::string& name, const Vec3& center,
                               const Vec3& radii) {
  return {name, object, center, Quat::Identity(), radii};
}

/// Piecewise-linear keyframed pose track: poses at the given normalized times, held
/// constant before the first and after the last.
struct Keyframes {
  std::vector<double> times;
  std::vector<Pose> poses;

  Pose at(double s) const {
    if (s <= times.front()) return poses.front();
    for (std::size_t k = 1; k < times.size(); ++k)
      if (s <= times[k]) return interpolate(poses[k - 1], poses[k], (s - times[k - 1]) / (times[k] - times[k - 1]));
    return poses.back();
  }
};

using Script = std::vector<Keyframes>;  // one per object

inline std::vector<DemonstrationRecording> render(const std::string& task, const std::vector<ObjectDecl>& objects,
                                                  const Script& script, const std::vector<double>& truth,
                                                  const SynthConfig& cfg) {
  cfg.validate();
  const auto n_frames = static_cast<std::size_t>(std::llround(cfg.duration * cfg.rate)) + 1;
  const double rot_sigma = cfg.noise_sigma * kRotationNoisePerMm;
  std::vector<DemonstrationRecording> out;
  for (int d = 0; d < cfg.n_demos; ++d) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(d)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DemonstrationRecording rec;
    rec.task = task;
    rec.objects = objects;
    rec.ground_truth_keypoints = truth;
    rec.frames.reserve(n_frames);
    for (std::size_t f = 0; f < n_frames; ++f) {
      Frame frame;
      frame.timestamp = static_cast<double>(f) / cfg.rate;
      const double s = static_cast<double>(f) / static_cast<double>(n_frames - 1);
      for (const auto& track : script) {
        Pose p = track.at(s);
        if (cfg.noise_sigma > 0.0) {
          const Vec3 dp(gauss(rng), gauss(rng), gauss(rng));
          const Vec3 dr(gauss(rng), gauss(rng), gauss(rng));
          p.position += cfg.noise_sigma * dp;
          const Vec3 rv = rot_sigma * dr;
          if (rv.norm() > 0.0)
            p.orientation = (Quat(Eigen::AngleAxisd(rv.norm(), rv.normalized())) * p.orientation).normalized();
        }
        frame.poses.push_back(p);
      }
      rec.frames.push_back(std::move(frame));
    }
    rec.validate();
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pouring: the left hand holds the cup, the right hand the bottle.

struct PourLayout {
  Pose table{Vec3(450, 0, -20), Quat::Identity()};
  Pose cup_start{Vec3(450, 250, 60), Quat::Identity()};
  Pose cup_pour{Vec3(420, 80, 160), Quat::Identity()};
  Pose bottle_start{Vec3(450, -250, 125), Quat::Identity()};
  Pose bottle_above{Vec3(420, -60, 330), Quat::Identity()};
  double tilt = -105.0 * M_PI / 180.0;  // about world x
  Vec3 spout_target{420, 80, 290};      // 70 mm above the cup opening
  double bottle_half_height = 125.0;
  double cup_half_height = 60.0;
  // phase boundaries in normalized time
  double approach_start = 0.05, approach_end = 0.30, tilt_end = 0.45, hold_end = 0.65, retreat_end = 0.95;
};

inline std::vector<ObjectDecl> pour_objects(const PourLayout& l = {}) {
  return {
      {"table", {detail::region("table", "place onto", {0, 0, 20}, {300, 300, 0})}},
      {"cup large",
       {detail::region("cup large", "place", {0, 0, -l.cup_half_height}, {40, 40, 0}),
        detail::region("cup large", "pour into", {0, 0, l.cup_half_height}, {35, 35, 0})}},
      {"apple juice",
       {detail::region("apple juice", "pour from", {0, 0, l.bottle_half_height}, {15, 15, 0}),
        detail::region("apple juice", "place", {0, 0, -l.bottle_half_height}, {40, 40, 0})}},
  };
}

/// Bottle pose at the end of the tilt: rotated about x with the spout at `spout_target`.
inline Pose pour_tilted_bottle(const PourLayout& l = {}) {
  const Quat q(Eigen::AngleAxisd(l.tilt, Vec3::UnitX()));
  return Pose(l.spout_target - q * Vec3(0, 0, l.bottle_half_height), q);
}

inline std::vector<double> pour_ground_truth(const PourLayout& l = {}) {
  return {l.approach_end, l.tilt_end, l.hold_end, l.retreat_end};
}

inline std::vector<DemonstrationRecording> synth_pour(const SynthConfig& cfg, const PourLayout& l = {}) {
  const Pose tilted = pour_tilted_bottle(l);
  const std::vector<double> times{l.approach_start, l.approach_end, l.tilt_end, l.hold_end, l.retreat_end};
  detail::Script script{
      {{0.0}, {l.table}},
      {times, {l.cup_start, l.cup_pour, l.cup_pour, l.cup_pour, l.cup_start}},
      {times, {l.bottle_start, l.bottle_above, tilted, tilted, l.bottle_start}},
  };
  return detail::render("pouring drink", pour_objects(l), script, pour_ground_truth(l), cfg);
}

// ---------------------------------------------------------------------------
// Rolling: the right hand pushes the pin back and forth along x five times.

struct RollLayout {
  Pose table{Vec3(450, 0, -20), Quat::Identity()};
  Vec3 pin_start{400, 0, 30};
  double stroke = 120.0;  // mm along +x
  int cycles = 5;
  double start = 0.05, end = 0.95;
  double handle_offset = 200.0;
};

inline std::vector<ObjectDecl> roll_objects(const RollLayout& l = {}) {
  return {
      {"rolling pin",
       {detail::region("rolling pin", "left handle", {0, l.handle_offset, 0}, {20, 20, 40}),
        detail::region("rolling pin", "right handle", {0, -l.handle_offset, 0}, {20, 20, 40})}},
      {"table", {detail::region("table", "place onto", {0, 0, 20}, {300, 300, 0})}},
  };
}

/// Turnaround times: start, the 2 * cycles - 1 reversals, and end.
inline std::vector<double> roll_ground_truth(const RollLayout& l = {}) {
  std::vector<double> out;
  const int strokes = 2 * l.cycles;
  for (int k = 0; k <= strokes; ++k) out.push_back(l.start + (l.end - l.start) * k / strokes);
  return out;
}

inline std::vector<DemonstrationRecording> synth_roll(const SynthConfig& cfg, const RollLayout& l = {}) {
  if (l.cycles < 1) throw InputError("synth_roll: cycles must be >= 1");
  detail::Keyframes pin;
  pin.times = roll_ground_truth(l);
  for (std::size_t k = 0; k < pin.times.size(); ++k)
    pin.poses.push_back(Pose(l.pin_start + Vec3((k % 2) * l.stroke, 0, 0), Quat::Identity()));
  detail::Script script{pin, {{0.0}, {l.table}}};
  return detail::render("rolling dough", roll_objects(l), script, roll_ground_truth(l), cfg);
}

}  // namespace sbam::synth
