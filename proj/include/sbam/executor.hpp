#pragma once

// Reproduction of a learned action on a bimanual robot. Each global keypoint becomes one
// joint-space minimization of similarity + posture + damping, solved in time order with
// the previous solution as the start point; joints are interpolated linearly in between.

#include "sbam/constraints.hpp"
#include "sbam/demonstration.hpp"
#include "sbam/error.hpp"
#include "sbam/geometry.hpp"
#include "sbam/kinematics.hpp"
#include "sbam/learning.hpp"
#include "sbam/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sbam {

struct ExecutorConfig {
  double c_h = 0.1;        // posture
  double c_d = 0.1;        // damping
  double c_lim = 1e6;      // joint-limit penalty
  NelderMeadConfig optimizer;
  double initial_step_frac = 0.05;  // initial simplex edge as a fraction of each joint range
  int restarts = 2;                 // fresh simplices around the incumbent after convergence
  double warn_scale = 50.0;         // t_s warning threshold per sqrt(dimension) and pair
  double duration = 10.0;           // s, length of the emitted trajectory
  double sample_rate = 30.0;        // Hz
  double min_support = 0.5;         // fraction of demonstrations a keypoint needs to set targets

  void validate() const {
    if (c_h < 0.0 || c_d < 0.0 || c_lim < 0.0) throw InputError("executor: coefficients must be >= 0");
    if (!(initial_step_frac > 0.0)) throw InputError("executor: initial_step_frac must be > 0");
    if (restarts < 0) throw InputError("executor: restarts must be >= 0");
    if (!(duration > 0.0) || !(sample_rate > 0.0)) throw InputError("executor: duration and sample_rate must be > 0");
    if (optimizer.max_iterations < 1) throw InputError("executor: max_iterations must be >= 1");
    if (!(min_support >= 0.0 && min_support <= 1.0)) throw InputError("executor: min_support must be in [0, 1]");
  }

  /// Smallest keypoint support count admitted for a model learned from `demos` demonstrations.
  int min_keypoint_support(int demos) const {
    return std::max(1, static_cast<int>(std::ceil(min_support * demos - 1e-9)));
  }
};

/// Target of one region pair at one keypoint time.
struct PairTarget {
  RegionPair pair;
  std::string object0, object1;
  Vec3 center0 = Vec3::Zero(), center1 = Vec3::Zero();  // region centers in object frames
  std::vector<double> mean, std, weight;
  std::vector<char> angular;
};

struct KeypointProblem {
  double t = 0.0;
  double dt = 0.0;  // normalized time since the previous keypoint
  std::vector<PairTarget> targets;
  std::vector<double> previous_theta;
  std::map<std::string, Vec3> previous_object_positions;
};

struct ObjectiveBreakdown {
  double t_s = 0.0;
  double t_h = 0.0;
  double t_d = 0.0;
  double total = 0.0;
};

struct KeypointSolution {
  double t = 0.0;
  std::vector<double> theta;
  std::map<std::string, Pose> object_poses;
  ObjectiveBreakdown breakdown;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<std::size_t> clamped;
};

struct TrajectorySample {
  double time = 0.0;  // s
  std::vector<double> theta;
};

struct ExecutionResult {
  ConstraintKind kind = ConstraintKind::Cartesian;
  std::vector<std::string> joint_names;
  std::vector<KeypointSolution> keypoints;
  std::vector<TrajectorySample> trajectory;
  std::vector<std::string> warnings;
};

/// Everything that stays fixed during one execution.
struct ExecutionContext {
  const Sbam& sbam;
  const RobotModel& model;
  GraspAssignment grasps;
  std::map<std::string, Pose> static_objects;
};

// ---------------------------------------------------------------------------
// Problem assembly

inline KeypointProblem build_problem(const Sbam& sbam, double t, double dt, std::vector<double> previous_theta,
                                     const std::map<std::string, Pose>& previous_poses, int min_n = 1) {
  KeypointProblem p;
  p.t = t;
  p.dt = dt;
  p.previous_theta = std::move(previous_theta);
  for (const auto& [id, pose] : previous_poses) p.previous_object_positions[id] = pose.position;
  const std::size_t dims = dimension_labels(sbam.kind, sbam.symbolic_defs).size();
  for (const auto& pair : sbam.pairs()) {
    PairTarget pt;
    pt.pair = pair;
    pt.object0 = pair.first.object;
    pt.object1 = pair.second.object;
    pt.center0 = find_region(sbam.objects, pair.first).local_center;
    pt.center1 = find_region(sbam.objects, pair.second).local_center;
    pt.mean.assign(dims, 0.0);
    pt.std.assign(dims, 0.0);
    pt.angular.assign(dims, 0);
    std::vector<char> seen(dims, 0);
    for (const auto& g : sbam.gcacots) {
      if (!(g.pair == pair) || g.keypoints.empty()) continue;
      if (g.dim >= dims) throw InputError("GCACOT dimension out of range for '" + pair.label() + "'");
      const auto [m, s] = target_at(g, t, min_n);
      pt.mean[g.dim] = m;
      pt.std[g.dim] = s;
      pt.angular[g.dim] = g.angular;
      seen[g.dim] = 1;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw InputError("SBAM lacks a constraint dimension for '" + pair.label() + "'");
    pt.weight = weights_from_std(pt.std).w;
    p.targets.push_back(std::move(pt));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Objective terms

namespace detail {

/// Per-definition log normalizers of the symbolic densities, computed once.
struct SymbolicLogTable {
  std::vector<SymbolicConstraintDef> defs;
  std::vector<double> log_norm;

  explicit SymbolicLogTable(std::span<const SymbolicConstraintDef> d) : defs(d.begin(), d.end()) {
    for (const auto& def : defs)
      log_norm.push_back(-0.5 * std::log(2.0 * M_PI * def.var_rho) - std::log(2.0 * M_PI * bessel_i0(def.kappa_phi)) -
                         0.5 * std::log(2.0 * M_PI * def.var_z));
  }

  void evaluate(const Vec3& d, std::vector<double>& out) const {
    const double rho = std::hypot(d.x(), d.y());
    const double phi = (d.x() == 0.0 && d.y() == 0.0) ? 0.0 : std::atan2(d.y(), d.x());
    out.resize(defs.size());
    for (std::size_t i = 0; i < defs.size(); ++i) {
      const auto& def = defs[i];
      const double dr = rho - def.mu_rho, dz = d.z() - def.mu_z;
      out[i] = log_norm[i] - 0.5 * dr * dr / def.var_rho + def.kappa_phi * std::cos(phi - def.mu_phi) -
               0.5 * dz * dz / def.var_z;
    }
  }
};

inline const Pose& pose_of(const std::map<std::string, Pose>& poses, const std::string& id) {
  const auto it = poses.find(id);
  if (it == poses.end()) throw InputError("no pose for object '" + id + "'");
  return it->second;
}

}  // namespace detail

/// Constraint values of every target pair for the given object poses, in the
/// representation of `kind` (log densities for symbolic constraints).
inline std::vector<std::vector<double>> current_constraints(const KeypointProblem& problem, ConstraintKind kind,
                                                           std::span<const SymbolicConstraintDef> defs,
                                                           const std::map<std::string, Pose>& poses) {
  std::vector<std::vector<double>> out;
  for (const auto& pt : problem.targets) {
    const Vec3 a0 = detail::pose_of(poses, pt.object0).apply(pt.center0);
    const Vec3 a1 = detail::pose_of(poses, pt.object1).apply(pt.center1);
    out.push_back(tracked_values(kind, a0, a1, defs));
  }
  return out;
}

/// t_s: sum over pairs of the square root of the weighted similarity.
inline double similarity_term(const KeypointProblem& problem, ConstraintKind kind,
                              std::span<const SymbolicConstraintDef> defs, const std::map<std::string, Pose>& poses) {
  double ts = 0.0;
  for (const auto& pt : problem.targets) {
    const Vec3 a0 = detail::pose_of(poses, pt.object0).apply(pt.center0);
    const Vec3 a1 = detail::pose_of(poses, pt.object1).apply(pt.center1);
    const ConstraintWeights w{pt.weight};
    double s = 0.0;
    if (kind == ConstraintKind::Symbolic) {
      s = similarity_symbolic_log(symbolic_log_constraint(a0, a1, defs), pt.mean, pt.weight);
    } else {
      const ConstraintVector current = kind == ConstraintKind::Cartesian ? cartesian_constraint(a0, a1)
                                                                         : cylindrical_constraint(a0, a1);
      const ConstraintVector target{kind, pt.mean, {}};
      s = similarity(current, target, w);
    }
    ts += std::sqrt(s);
  }
  return ts;
}

/// Default posture cost: c_h * sum(((theta - neutral) / range)^2).
inline double posture_term(std::span<const double> theta, const RobotModel& model, double c_h) {
  if (theta.size() != model.dof()) throw std::invalid_argument("posture_term: joint vector has wrong dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const auto& j = model.joint(i);
    const double u = (theta[i] - model.neutral[i]) / (j.hi - j.lo);
    s += u * u;
  }
  return c_h * s;
}

/// Mean standard deviation over all dimensions of all pairs touching each object.
inline std::map<std::string, double> damping_weights(const KeypointProblem& problem, double c_d) {
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& pt : problem.targets)
    for (double s : pt.std)
      for (const auto* id : {&pt.object0, &pt.object1}) {
        auto& [sum, count] = acc[*id];
        sum += s;
        ++count;
        if (pt.object0 == pt.object1) break;
      }
  std::map<std::string, double> out;
  for (const auto& [id, sc] : acc) out[id] = c_d * problem.dt * sc.first / sc.second;
  return out;
}

/// t_d: weighted displacement of every object since the previous keypoint.
inline double damping_term(const KeypointProblem& problem, const std::map<std::string, double>& weights,
                           const std::map<std::string, Pose>& poses) {
  double td = 0.0;
  for (const auto& [id, w] : weights) {
    if (w == 0.0) continue;
    const auto prev = problem.previous_object_positions.find(id);
    if (prev == problem.previous_object_positions.end()) continue;
    td += w * (detail::pose_of(poses, id).position - prev->second).norm();
  }
  return td;
}

inline ObjectiveBreakdown evaluate_objective(const ExecutionContext& ctx, const KeypointProblem& problem,
                                             const ExecutorConfig& cfg, std::span<const double> theta) {
  const auto poses = object_poses(ctx.model, theta, ctx.grasps, ctx.static_objects);
  ObjectiveBreakdown b;
  b.t_s = similarity_term(problem, ctx.sbam.kind, ctx.sbam.symbolic_defs, poses);
  b.t_h = posture_term(theta, ctx.model, cfg.c_h);
  b.t_d = damping_term(problem, damping_weights(problem, cfg.c_d), poses);
  b.total = b.t_s + b.t_h + b.t_d;
  return b;
}

/// Fast objective used inside the optimizer: clamps to the limits and adds the
/// quadratic limit penalty.
class KeypointObjective {
 public:
  KeypointObjective(const ExecutionContext& ctx, const KeypointProblem& problem, const ExecutorConfig& cfg)
      : ctx_(ctx), problem_(problem), cfg_(cfg), damping_(damping_weights(problem, cfg.c_d)),
        symbolic_(ctx.sbam.symbolic_defs) {
    for (const auto& pt : problem.targets) {
      pair_objects_.push_back({locate(pt.object0), locate(pt.object1)});
    }
    for (const auto& [id, w] : damping_) {
      const auto prev = problem.previous_object_positions.find(id);
      if (w != 0.0 && prev != problem.previous_object_positions.end())
        damped_.push_back({locate(id), w, prev->second});
    }
  }

  double operator()(std::span<const double> theta) const {
    thread_local std::vector<double> clamped;
    clamped.assign(theta.begin(), theta.end());
    double violation = 0.0;
    for (std::size_t i = 0; i < clamped.size(); ++i) {
      const auto& j = ctx_.model.joint(i);
      if (clamped[i] < j.lo) { violation += (j.lo - clamped[i]) * (j.lo - clamped[i]); clamped[i] = j.lo; }
      else if (clamped[i] > j.hi) { violation += (clamped[i] - j.hi) * (clamped[i] - j.hi); clamped[i] = j.hi; }
    }
    const auto ee = forward_kinematics(ctx_.model, clamped);
    auto pose_of = [&](const Slot& s) -> Pose {
      if (s.grasp) return ee.of(s.grasp->hand) * s.grasp->transform;
      return s.fixed;
    };
    thread_local std::vector<Pose> poses;
    poses.clear();
    for (const auto& s : slots_) poses.push_back(pose_of(s));

    double ts = 0.0;
    thread_local std::vector<double> logs;
    for (std::size_t p = 0; p < problem_.targets.size(); ++p) {
      const auto& pt = problem_.targets[p];
      const Vec3 d = poses[pair_objects_[p].first].apply(pt.center0) - poses[pair_objects_[p].second].apply(pt.center1);
      double s = 0.0;
      switch (ctx_.sbam.kind) {
        case ConstraintKind::Cartesian:
          for (int k = 0; k < 3; ++k) {
            const double e = pt.weight[k] * d[k] - pt.weight[k] * pt.mean[k];
            s += e * e;
          }
          break;
        case ConstraintKind::Cylindrical: {
          const double rho = std::hypot(d.x(), d.y());
          const double phi = (d.x() == 0.0 && d.y() == 0.0) ? 0.0 : std::atan2(d.y(), d.x());
          const double wr = pt.weight[0], wp = pt.weight[1], wz = pt.weight[2];
          const double ex = std::cos(wp * phi) * wr * rho - std::cos(wp * pt.mean[1]) * wr * pt.mean[0];
          const double ey = std::sin(wp * phi) * wr * rho - std::sin(wp * pt.mean[1]) * wr * pt.mean[0];
          const double ez = wz * d.z() - wz * pt.mean[2];
          s = ex * ex + ey * ey + ez * ez;
          break;
        }
        case ConstraintKind::Symbolic:
          symbolic_.evaluate(d, logs);
          s = similarity_symbolic_log(logs, pt.mean, pt.weight);
          break;
      }
      ts += std::sqrt(s);
    }
    double td = 0.0;
    for (const auto& dm : damped_) td += dm.weight * (poses[dm.slot].position - dm.previous).norm();
    return ts + posture_term(clamped, ctx_.model, cfg_.c_h) + td + cfg_.c_lim * violation;
  }

 private:
  struct Slot {
    std::string id;
    const Grasp* grasp = nullptr;
    Pose fixed;
  };
  struct Damped {
    std::size_t slot;
    double weight;
    Vec3 previous;
  };

  std::size_t locate(const std::string& id) {
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i].id == id) return i;
    Slot s;
    s.id = id;
    if (const auto g = ctx_.grasps.find(id); g != ctx_.grasps.end()) {
      s.grasp = &g->second;
    } else if (const auto st = ctx_.static_objects.find(id); st != ctx_.static_objects.end()) {
      s.fixed = st->second;
    } else {
      throw InputError("no pose for object '" + id + "'");
    }
    slots_.push_back(s);
    return slots_.size() - 1;
  }

  const ExecutionContext& ctx_;
  const KeypointProblem& problem_;
  const ExecutorConfig& cfg_;
  std::map<std::string, double> damping_;
  detail::SymbolicLogTable symbolic_;
  std::vector<Slot> slots_;
  std::vector<std::pair<std::size_t, std::size_t>> pair_objects_;
  std::vector<Damped> damped_;
};

/// Threshold above which t_s is reported as an unsatisfiable keypoint.
inline double warning_threshold(const Sbam& sbam, const ExecutorConfig& cfg) {
  const double dims = static_cast<double>(dimension_labels(sbam.kind, sbam.symbolic_defs).size());
  return static_cast<double>(sbam.pairs().size()) * std::sqrt(dims) * cfg.warn_scale;
}

/// Minimizes the keypoint objective from `start`, restarting with a fresh simplex
/// around the incumbent while that still improves it.
inline NelderMeadResult minimize_keypoint(const KeypointObjective& objective, const RobotModel& model,
                                          std::span<const double> start, const ExecutorConfig& cfg) {
  NelderMeadConfig nm = cfg.optimizer;
  nm.steps.clear();
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const auto& j = model.joint(i);
    nm.steps.push_back(cfg.initial_step_frac * (j.hi - j.lo));
  }
  NelderMeadResult best = nelder_mead(objective, start, nm);
  for (int r = 0; r < cfg.restarts; ++r) {
    NelderMeadResult next = nelder_mead(objective, best.x, nm);
    next.iterations += best.iterations;
    next.evaluations += best.evaluations;
    const bool improved = next.f < best.f - std::max(cfg.optimizer.tol_f, 1e-9 * std::abs(best.f));
    if (next.f <= best.f) best = std::move(next);
    if (!improved) break;
  }
  return best;
}

/// Linear joint interpolation through the keypoint solutions.
inline std::vector<TrajectorySample> interpolate_trajectory(const std::vector<KeypointSolution>& kps, double duration,
                                                            double sample_rate) {
  std::vector<TrajectorySample> out;
  if (kps.empty()) return out;
  std::vector<double> times;
  const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  for (std::size_t i = 0; i <= n; ++i) times.push_back(static_cast<double>(i) / static_cast<double>(n));
  for (const auto& kp : kps) times.push_back(kp.t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double s : times) {
    TrajectorySample ts;
    ts.time = s * duration;
    if (s <= kps.front().t) {
      ts.theta = kps.front().theta;
    } else if (s >= kps.back().t) {
      ts.theta = kps.back().theta;
    } else {
      std::size_t k = 1;
      while (kps[k].t < s) ++k;
      const auto& a = kps[k - 1];
      const auto& b = kps[k];
      if (s == b.t) {
        ts.theta = b.theta;
      } else {
        const double u = (s - a.t) / (b.t - a.t);
        ts.theta.resize(a.theta.size());
        for (std::size_t j = 0; j < a.theta.size(); ++j) ts.theta[j] = a.theta[j] + u * (b.theta[j] - a.theta[j]);
      }
    }
    out.push_back(std::move(ts));
  }
  return out;
}

/// Sequential keypoint optimization from `theta_init` and the resolved initial scene.
inline ExecutionResult solve_keypoints(const Sbam& sbam, const ResolvedScene& scene, const RobotModel& model,
                                       std::span<const double> theta_init, const ExecutorConfig& cfg = {}) {
  cfg.validate();
  model.validate();
  if (theta_init.size() != model.dof()) throw InputError("solve_keypoints: initial configuration has wrong dimension");
  if (sbam.global_keypoints.empty()) throw InputError("solve_keypoints: SBAM has no global keypoints");
  for (const auto& obj : sbam.objects)
    if (!scene.initial_poses.count(obj.id)) throw InputError("scene lacks object '" + obj.id + "'");

  ExecutionContext ctx{sbam, model, scene.grasps, scene.static_objects};
  ExecutionResult result;
  result.kind = sbam.kind;
  for (const auto& j : model.left.joints) result.joint_names.push_back("left/" + j.name);
  for (const auto& j : model.right.joints) result.joint_names.push_back("right/" + j.name);

  const double threshold = warning_threshold(sbam, cfg);
  std::vector<double> theta(theta_init.begin(), theta_init.end());
  std::map<std::string, Pose> previous = scene.initial_poses;
  double previous_t = 0.0;
  for (double t : sbam.global_keypoints) {
    const KeypointProblem problem =
        build_problem(sbam, t, t - previous_t, theta, previous, cfg.min_keypoint_support(sbam.demo_count));
    const KeypointObjective objective(ctx, problem, cfg);
    const NelderMeadResult nm = minimize_keypoint(objective, model, theta, cfg);

    KeypointSolution sol;
    sol.t = t;
    const ClampResult clamped = clamp_to_limits(model, nm.x);
    sol.theta = clamped.theta;
    sol.clamped = clamped.clamped;
    sol.object_poses = object_poses(model, sol.theta, ctx.grasps, ctx.static_objects);
    sol.breakdown = evaluate_objective(ctx, problem, cfg, sol.theta);
    sol.iterations = nm.iterations;
    sol.evaluations = nm.evaluations;
    sol.converged = nm.converged;
    if (sol.breakdown.t_s > threshold) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "keypoint t=%.4f: similarity term %.3f exceeds %.3f", t, sol.breakdown.t_s,
                    threshold);
      result.warnings.emplace_back(buf);
    }
    theta = sol.theta;
    previous = sol.object_poses;
    previous_t = t;
    result.keypoints.push_back(std::move(sol));
  }
  result.trajectory = interpolate_trajectory(result.keypoints, cfg.duration, cfg.sample_rate);
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation

struct PairDistanceStats {
  RegionPair pair;
  std::vector<double> distances;  // one per global keypoint, mm
  double avg = 0.0;
  double std = 0.0;               // population standard deviation
  double min = 0.0;
};

inline PairDistanceStats summarize_distances(RegionPair pair, std::vector<double> d) {
  PairDistanceStats s;
  s.pair = std::move(pair);
  s.distances = std::move(d);
  if (s.distances.empty()) return s;
  double sum = 0.0;
  for (double v : s.distances) sum += v;
  s.avg = sum / static_cast<double>(s.distances.size());
  double var = 0.0;
  for (double v : s.distances) var += (v - s.avg) * (v - s.avg);
  s.std = std::sqrt(var / static_cast<double>(s.distances.size()));
  s.min = *std::min_element(s.distances.begin(), s.distances.end());
  return s;
}

/// Per pair, the distance between executed and demonstrated region-center difference
/// vectors at every global keypoint.
inline std::vector<PairDistanceStats> evaluate_against_demo(const ExecutionResult& execution,
                                                            const DemonstrationRecording& demo, const Sbam& sbam) {
  std::vector<PairDistanceStats> out;
  for (const auto& pair : sbam.pairs()) {
    const auto& r0 = find_region(demo.objects, pair.first);
    const auto& r1 = find_region(demo.objects, pair.second);
    const std::size_t o0 = demo.object_index(pair.first.object), o1 = demo.object_index(pair.second.object);
    std::vector<double> d;
    for (const auto& kp : execution.keypoints) {
      const Vec3 exec = detail::pose_of(kp.object_poses, pair.first.object).apply(r0.local_center) -
                        detail::pose_of(kp.object_poses, pair.second.object).apply(r1.local_center);
      const Vec3 shown = demo.pose_at(o0, kp.t).apply(r0.local_center) - demo.pose_at(o1, kp.t).apply(r1.local_center);
      d.push_back((exec - shown).norm());
    }
    out.push_back(summarize_distances(pair, std::move(d)));
  }
  return out;
}

/// One constraint dimension at one keypoint checked against its learned band.
struct BandCheck {
  double t = 0.0;
  RegionPair pair;
  std::string dimension;
  double value = 0.0;
  double mean = 0.0;
  double std = 0.0;
  double weight = 0.0;
  bool inside = false;
};

/// Every dimension whose weight exceeds `min_weight`, checked for
/// |value - mean| <= k * std at every executed keypoint.
inline std::vector<BandCheck> check_constraint_bands(const ExecutionResult& execution, const Sbam& sbam,
                                                     double min_weight = 0.5, double k = 3.0, int min_n = 1) {
  std::vector<BandCheck> out;
  const auto labels = dimension_labels(sbam.kind, sbam.symbolic_defs);
  for (const auto& kp : execution.keypoints) {
    const KeypointProblem problem = build_problem(sbam, kp.t, 0.0, kp.theta, kp.object_poses, min_n);
    const auto values = current_constraints(problem, sbam.kind, sbam.symbolic_defs, kp.object_poses);
    for (std::size_t p = 0; p < problem.targets.size(); ++p) {
      const auto& pt = problem.targets[p];
      for (std::size_t d = 0; d < pt.mean.size(); ++d) {
        if (!(pt.weight[d] > min_weight)) continue;
        double diff = values[p][d] - pt.mean[d];
        if (pt.angular[d]) diff = wrap_angle(diff);
        out.push_back({kp.t, pt.pair, labels[d], values[p][d], pt.mean[d], pt.std[d], pt.weight[d],
                       std::abs(diff) <= k * pt.std[d] + 1e-9});
      }
    }
  }
  return out;
}

}  // namespace sbam
