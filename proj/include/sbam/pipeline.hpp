#pragma once

// End-to-end wiring: constraint tracks from recordings, learning an SBAM, executing it
// and leave-one-out cross-validation.

#include "sbam/constraints.hpp"
#include "sbam/demonstration.hpp"
#include "sbam/error.hpp"
#include "sbam/executor.hpp"
#include "sbam/kinematics.hpp"
#include "sbam/learning.hpp"
#include "sbam/segmentation.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <span>
#include <string>
#include <vector>

namespace sbam {

/// One constraint dimension of one region pair over one demonstration, with its
/// segmentation. Angular tracks hold unwrapped values.
struct ConstraintTrack {
  RegionPair pair;
  std::size_t dim = 0;
  std::string dimension;
  bool angular = false;
  std::vector<Sample> samples;
  SegmentationResult segmentation;

  /// Value of the piecewise-linear approximation at sample m.
  double approximation(std::size_t m) const {
    const auto& bp = segmentation.breakpoints;
    const auto hi = std::lower_bound(bp.begin(), bp.end(), m);
    if (*hi == m) return samples[m].v;
    const std::size_t b = *hi, a = *(hi - 1);
    const double u = (samples[m].t - samples[a].t) / (samples[b].t - samples[a].t);
    return samples[a].v + u * (samples[b].v - samples[a].v);
  }
};

/// Rejects demonstration sets whose object and region declarations differ.
inline void check_consistent_declarations(std::span<const DemonstrationRecording> demos) {
  if (demos.empty()) throw InputError("need at least one demonstration");
  for (std::size_t d = 1; d < demos.size(); ++d)
    if (!(demos[d].objects == demos[0].objects))
      throw InputError("demonstration " + std::to_string(d) +
                       ": object or region declarations differ from demonstration 0");
}

/// Constraint tracks of every pair and dimension, segmented with `cfg`.
inline std::vector<ConstraintTrack> constraint_tracks(const DemonstrationRecording& demo, ConstraintKind kind,
                                                      std::span<const SymbolicConstraintDef> defs,
                                                      std::span<const RegionPair> pairs,
                                                      const SegmentationConfig& cfg) {
  demo.validate();
  const auto times = demo.normalized_times();
  const auto labels = dimension_labels(kind, defs);
  std::vector<ConstraintTrack> out;
  for (const auto& pair : pairs) {
    const auto& r0 = find_region(demo.objects, pair.first);
    const auto& r1 = find_region(demo.objects, pair.second);
    const std::size_t o0 = demo.object_index(pair.first.object), o1 = demo.object_index(pair.second.object);
    std::vector<std::vector<double>> series(labels.size());
    for (const auto& f : demo.frames) {
      const auto v = tracked_values(kind, f.poses[o0].apply(r0.local_center), f.poses[o1].apply(r1.local_center), defs);
      for (std::size_t d = 0; d < v.size(); ++d) series[d].push_back(v[d]);
    }
    for (std::size_t d = 0; d < labels.size(); ++d) {
      ConstraintTrack tr;
      tr.pair = pair;
      tr.dim = d;
      tr.dimension = labels[d];
      tr.angular = is_angular_dimension(kind, d);
      if (tr.angular) series[d] = unwrap_angles(series[d]);
      for (std::size_t m = 0; m < times.size(); ++m) tr.samples.push_back({times[m], series[d][m]});
      tr.segmentation = segment(tr.samples, cfg);
      out.push_back(std::move(tr));
    }
  }
  return out;
}

inline std::vector<DemoTrack> demo_tracks(std::span<const ConstraintTrack> tracks) {
  std::vector<DemoTrack> out;
  for (const auto& tr : tracks) out.push_back({tr.pair, tr.dim, candidates_from(tr.samples, tr.segmentation, tr.angular)});
  return out;
}

struct LearnOutput {
  Sbam sbam;
  std::vector<std::vector<ConstraintTrack>> tracks;  // per demonstration
};

/// Segments every track, ingests the demonstrations in order and extracts the global
/// keypoints.
inline LearnOutput learn_sbam(std::span<const DemonstrationRecording> demos, ConstraintKind kind,
                              std::vector<SymbolicConstraintDef> defs, const LearningConfig& cfg = {}) {
  check_consistent_declarations(demos);
  if (kind != ConstraintKind::Symbolic) defs.clear();
  SbamBuilder builder(kind, defs, demos[0].objects, cfg);
  const auto pairs = enumerate_pairs(demos[0].objects, cfg.include_same_object_pairs);
  if (pairs.empty()) throw InputError("demonstrations declare fewer than two affordance regions");
  LearnOutput out;
  for (const auto& demo : demos) {
    auto tracks = constraint_tracks(demo, kind, defs, pairs, cfg.segmentation);
    builder.ingest_demonstration(demo_tracks(tracks));
    out.tracks.push_back(std::move(tracks));
  }
  out.sbam = builder.finish();
  return out;
}

/// CSV rows (demo, pair, dimension, time, value, segment-line value, breakpoint flag).
inline std::string tracks_csv(const std::vector<std::vector<ConstraintTrack>>& per_demo) {
  std::string out = "demo,pair,dimension,t,value,approximation,breakpoint\n";
  char buf[128];
  for (std::size_t d = 0; d < per_demo.size(); ++d)
    for (const auto& tr : per_demo[d]) {
      std::size_t b = 0;
      for (std::size_t m = 0; m < tr.samples.size(); ++m) {
        const bool is_bp = b < tr.segmentation.breakpoints.size() && tr.segmentation.breakpoints[b] == m;
        if (is_bp) ++b;
        std::snprintf(buf, sizeof buf, ",%.9g,%.12g,%.12g,%d\n", tr.samples[m].t, tr.samples[m].v, tr.approximation(m),
                      is_bp ? 1 : 0);
        out += std::to_string(d) + ",\"" + tr.pair.label() + "\"," + tr.dimension + buf;
      }
    }
  return out;
}

// ---------------------------------------------------------------------------
// Execution on a scene

/// Executes `sbam` from the robot's neutral posture in `scene`.
inline ExecutionResult execute_sbam(const Sbam& sbam, const SceneSpec& scene, const RobotModel& model,
                                    const ExecutorConfig& cfg = {}) {
  const ResolvedScene resolved = resolve_scene(scene, model, model.neutral);
  return solve_keypoints(sbam, resolved, model, model.neutral, cfg);
}

// ---------------------------------------------------------------------------
// Cross-validation

struct FoldResult {
  std::size_t held_out = 0;
  Sbam sbam;
  ExecutionResult execution;
  std::vector<PairDistanceStats> distances;
  std::vector<BandCheck> bands;
};

struct CrossvalRow {
  RegionPair pair;
  double avg = 0.0, std = 0.0, min = 0.0;  // means over folds
};

struct CrossvalReport {
  ConstraintKind kind = ConstraintKind::Cartesian;
  std::vector<FoldResult> folds;
  std::vector<CrossvalRow> rows;
};

struct CrossvalConfig {
  LearningConfig learning;
  ExecutorConfig executor;
  int jobs = 1;
  double band_min_weight = 0.5;
  double band_k = 3.0;
};

inline FoldResult run_fold(std::span<const DemonstrationRecording> demos, std::size_t held_out, ConstraintKind kind,
                           const std::vector<SymbolicConstraintDef>& defs, const SceneSpec& scene_template,
                           const RobotModel& model, const CrossvalConfig& cfg) {
  std::vector<DemonstrationRecording> train;
  for (std::size_t d = 0; d < demos.size(); ++d)
    if (d != held_out) train.push_back(demos[d]);
  FoldResult fold;
  fold.held_out = held_out;
  fold.sbam = learn_sbam(train, kind, defs, cfg.learning).sbam;
  const SceneSpec scene = scene_template.with_initial_poses(demos[held_out]);
  fold.execution = execute_sbam(fold.sbam, scene, model, cfg.executor);
  fold.distances = evaluate_against_demo(fold.execution, demos[held_out], fold.sbam);
  fold.bands = check_constraint_bands(fold.execution, fold.sbam, cfg.band_min_weight, cfg.band_k,
                                     cfg.executor.min_keypoint_support(fold.sbam.demo_count));
  return fold;
}

/// Leave-one-out over all demonstrations. Folds run on up to `jobs` threads; results
/// are ordered by held-out index.
inline CrossvalReport crossval(std::span<const DemonstrationRecording> demos, ConstraintKind kind,
                               const std::vector<SymbolicConstraintDef>& defs, const SceneSpec& scene_template,
                               const RobotModel& model, const CrossvalConfig& cfg = {}) {
  if (demos.size() < 2) throw InputError("crossval: need at least 2 demonstrations");
  check_consistent_declarations(demos);
  CrossvalReport report;
  report.kind = kind;
  report.folds.resize(demos.size());
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, cfg.jobs));
  for (std::size_t begin = 0; begin < demos.size(); begin += jobs) {
    const std::size_t end = std::min(demos.size(), begin + jobs);
    if (jobs == 1) {
      report.folds[begin] = run_fold(demos, begin, kind, defs, scene_template, model, cfg);
      continue;
    }
    std::vector<std::future<FoldResult>> futures;
    for (std::size_t f = begin; f < end; ++f)
      futures.push_back(std::async(std::launch::async, [&, f] {
        return run_fold(demos, f, kind, defs, scene_template, model, cfg);
      }));
    for (std::size_t f = begin; f < end; ++f) report.folds[f] = futures[f - begin].get();
  }
  for (std::size_t p = 0; p < report.folds.front().distances.size(); ++p) {
    CrossvalRow row;
    row.pair = report.folds.front().distances[p].pair;
    for (const auto& fold : report.folds) {
      row.avg += fold.distances[p].avg;
      row.std += fold.distances[p].std;
      row.min += fold.distances[p].min;
    }
    const double n = static_cast<double>(report.folds.size());
    row.avg /= n;
    row.std /= n;
    row.min /= n;
    report.rows.push_back(row);
  }
  return report;
}

/// Plain-text table: one row per region pair with avg, std and min in mm.
inline std::string format_crossval_table(const CrossvalReport& report, const std::string& title = "") {
  std::string out;
  if (!title.empty()) out += title + "\n";
  std::size_t width = 4;
  std::vector<std::string> names;
  for (const auto& r : report.rows) {
    names.push_back(r.pair.first.label() + " \xE2\x86\x93 " + r.pair.second.label());
    width = std::max(width, names.back().size() - 2);  // the arrow is one column wide
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %-11s %10s %10s %10s\n", static_cast<int>(width), "pair", "type", "avg", "std",
                "min");
  out += buf;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    std::string name = names[i];
    name.append(width + 2 - name.size(), ' ');
    std::snprintf(buf, sizeof buf, "  %-11s %10.3f %10.3f %10.3f\n", to_string(report.kind).c_str(), r.avg, r.std, r.min);
    out += name + buf;
  }
  return out;
}

}  // namespace sbam
