#pragma once

#include "sbam/constraints.hpp"
#include "sbam/error.hpp"
#include "sbam/geometry.hpp"
#include "sbam/segmentation.hpp"
#include "sbam/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sbam {

// ---------------------------------------------------------------------------
// Region pairs

struct RegionRef {
  std::string object;
  std::string region;

  bool operator==(const RegionRef&) const = default;
  std::string label() const { return region + " of " + object; }
};

/// Ordered pair; constraint values describe the vector from `second` to `first`.
struct RegionPair {
  RegionRef first;
  RegionRef second;

  bool operator==(const RegionPair&) const = default;
  std::string label() const { return first.label() + " | " + second.label(); }
};

inline const AffordanceRegion& find_region(std::span<const ObjectDecl> objects, const RegionRef& ref) {
  for (const auto& obj : objects)
    if (obj.id == ref.object)
      for (const auto& r : obj.regions)
        if (r.name == ref.region) return r;
  throw InputError("unknown affordance region '" + ref.label() + "'");
}

/// All unordered region pairs in declaration order. Same-object pairs are included
/// unless disabled.
inline std::vector<RegionPair> enumerate_pairs(std::span<const ObjectDecl> objects,
                                               bool include_same_object = true) {
  std::vector<RegionRef> refs;
  for (const auto& obj : objects)
    for (const auto& r : obj.regions) refs.push_back({obj.id, r.name});
  std::vector<RegionPair> pairs;
  for (std::size_t i = 0; i < refs.size(); ++i)
    for (std::size_t j = i + 1; j < refs.size(); ++j) {
      if (!include_same_object && refs[i].object == refs[j].object) continue;
      pairs.push_back({refs[i], refs[j]});
    }
  return pairs;
}

// ---------------------------------------------------------------------------
// Generalized changes of affordance constraints over time

struct KeypointCandidate {
  double t = 0.0;
  double v = 0.0;
};

struct GcacotKeypoint {
  double t = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  int n = 1;

  bool operator==(const GcacotKeypoint&) const = default;
};

struct Gcacot {
  RegionPair pair;
  ConstraintKind kind = ConstraintKind::Cartesian;
  std::size_t dim = 0;
  std::string dimension;
  bool angular = false;
  std::vector<GcacotKeypoint> keypoints;

  bool operator==(const Gcacot&) const = default;
};

/// Segment endpoints of one constraint dimension of one pair in one demonstration.
struct DemoTrack {
  RegionPair pair;
  std::size_t dim = 0;
  std::vector<KeypointCandidate> candidates;
};

/// Keypoint candidates from a segmentation; values are read at the breakpoints.
inline std::vector<KeypointCandidate> candidates_from(std::span<const Sample> samples,
                                                      const SegmentationResult& seg, bool angular = false) {
  std::vector<KeypointCandidate> out;
  out.reserve(seg.breakpoints.size());
  for (std::size_t b : seg.breakpoints) {
    const double v = angular ? wrap_angle(samples[b].v) : samples[b].v;
    out.push_back({samples[b].t, v});
  }
  return out;
}

/// Incremental update with the n-th demonstration (n = kp.n + 1). The standard deviation
/// uses the previous mean in the squared deviation.
inline GcacotKeypoint update_keypoint(const GcacotKeypoint& kp, double t1, double v1, bool angular = false) {
  GcacotKeypoint out = kp;
  const double n = static_cast<double>(kp.n + 1);
  if (angular) v1 = kp.mean + wrap_angle(v1 - kp.mean);
  // written as a correction so identical inputs leave the mean bit-exact
  out.t = kp.t + (t1 - kp.t) / n;
  out.mean = kp.mean + (v1 - kp.mean) / n;
  if (angular) out.mean = wrap_angle(out.mean);
  const double dev = v1 - kp.mean;
  out.stddev = std::sqrt((dev * dev + (n - 2.0) * kp.stddev * kp.stddev) / (n - 1.0));
  out.n = kp.n + 1;
  return out;
}

// ---------------------------------------------------------------------------
// Candidate matching

struct MatchConfig {
  double gap_penalty = 2.0;
  bool anchor_ends = true;  // first/last always match first/last
};

struct MatchResult {
  std::vector<std::optional<std::size_t>> assignment;  // per incoming candidate; nullopt = new
  double cost = 0.0;
};

/// Order-preserving alignment of incoming candidates to existing keypoints by dynamic
/// programming. Matching i to j costs (dt / tau)^2 + (dv / sigma_v)^2 with tau = 1 / (number
/// of incoming candidates) and sigma_v the amplitude of the existing means; leaving either
/// side unmatched costs the gap penalty.
inline MatchResult match_candidates(const Gcacot& existing, std::span<const KeypointCandidate> incoming,
                                    const MatchConfig& cfg = {}) {
  const auto& kps = existing.keypoints;
  MatchResult out;
  out.assignment.assign(incoming.size(), std::nullopt);
  if (incoming.empty() || kps.empty()) return out;

  const double tau = 1.0 / static_cast<double>(incoming.size());
  double sigma_v = 0.0;
  {
    auto [lo, hi] = std::minmax_element(kps.begin(), kps.end(),
                                        [](const auto& a, const auto& b) { return a.mean < b.mean; });
    sigma_v = hi->mean - lo->mean;
    if (!(sigma_v > 0.0)) {
      auto [ilo, ihi] = std::minmax_element(incoming.begin(), incoming.end(),
                                            [](const auto& a, const auto& b) { return a.v < b.v; });
      sigma_v = ihi->v - ilo->v;
    }
    if (!(sigma_v > 0.0)) sigma_v = 1.0;
  }
  auto cost = [&](std::size_t e, std::size_t i) {
    const double dt = (incoming[i].t - kps[e].t) / tau;
    double dv = incoming[i].v - kps[e].mean;
    if (existing.angular) dv = wrap_angle(dv);
    dv /= sigma_v;
    return dt * dt + dv * dv;
  };

  std::size_t e_begin = 0, e_end = kps.size(), i_begin = 0, i_end = incoming.size();
  if (cfg.anchor_ends && kps.size() >= 2 && incoming.size() >= 2) {
    out.assignment.front() = 0;
    out.assignment.back() = kps.size() - 1;
    out.cost += cost(0, 0) + cost(kps.size() - 1, incoming.size() - 1);
    e_begin = i_begin = 1;
    --e_end;
    --i_end;
  }
  const std::size_t m = e_end - e_begin, k = i_end - i_begin;
  const double gap = cfg.gap_penalty;
  // dp[a][b]: best cost aligning the first a existing and first b incoming interior entries
  std::vector<double> dp((m + 1) * (k + 1), 0.0);
  std::vector<unsigned char> move((m + 1) * (k + 1), 0);  // 0 match, 1 skip existing, 2 new
  auto at = [k](std::size_t a, std::size_t b) { return a * (k + 1) + b; };
  for (std::size_t a = 1; a <= m; ++a) { dp[at(a, 0)] = a * gap; move[at(a, 0)] = 1; }
  for (std::size_t b = 1; b <= k; ++b) { dp[at(0, b)] = b * gap; move[at(0, b)] = 2; }
  for (std::size_t a = 1; a <= m; ++a)
    for (std::size_t b = 1; b <= k; ++b) {
      double best = dp[at(a - 1, b - 1)] + cost(e_begin + a - 1, i_begin + b - 1);
      unsigned char mv = 0;
      if (dp[at(a - 1, b)] + gap < best) { best = dp[at(a - 1, b)] + gap; mv = 1; }
      if (dp[at(a, b - 1)] + gap < best) { best = dp[at(a, b - 1)] + gap; mv = 2; }
      dp[at(a, b)] = best;
      move[at(a, b)] = mv;
    }
  out.cost += dp[at(m, k)];
  std::size_t a = m, b = k;
  while (a > 0 || b > 0) {
    const unsigned char mv = move[at(a, b)];
    if (mv == 0) {
      out.assignment[i_begin + b - 1] = e_begin + a - 1;
      --a;
      --b;
    } else if (mv == 1) {
      --a;
    } else {
      --b;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Global keypoints

struct KeypointExtractionConfig {
  int bins = 50;
  int filter_order = 2;
  double cutoff = 0.2;            // normalized to Nyquist
  double prominence_frac = 0.1;   // of the largest filtered bin
};

struct KeypointHistogram {
  std::vector<double> counts;
  std::vector<double> filtered;
  std::vector<std::size_t> peaks;
  std::vector<double> times;  // 0, peak bin centers, 1
};

/// Histogram of interior GCACOT keypoint times, low-passed forward and backward, with
/// prominent peaks taken as global keypoints. Each keypoint counts once per demonstration
/// candidate merged into it (its n). Track endpoints (t = 0 and t = 1) are left out of
/// the histogram; both are always part of the result.
inline KeypointHistogram keypoint_histogram(std::span<const Gcacot> gcacots,
                                            const KeypointExtractionConfig& cfg = {}) {
  if (gcacots.empty()) throw InputError("extract_global_keypoints: no GCACOTs");
  if (cfg.bins < 3) throw InputError("extract_global_keypoints: need at least 3 bins");
  std::size_t total = 0;
  KeypointHistogram h;
  h.counts.assign(static_cast<std::size_t>(cfg.bins), 0.0);
  for (const auto& g : gcacots)
    for (const auto& kp : g.keypoints) {
      ++total;
      if (kp.t <= 0.0 || kp.t >= 1.0) continue;
      const auto bin = std::min(static_cast<std::size_t>(kp.t * cfg.bins), h.counts.size() - 1);
      h.counts[bin] += static_cast<double>(kp.n);
    }
  if (total == 0) throw InputError("extract_global_keypoints: empty keypoint set");

  h.times.push_back(0.0);
  const double max_count = *std::max_element(h.counts.begin(), h.counts.end());
  if (max_count > 0.0) {
    const auto filter = signal::butterworth_lowpass(cfg.filter_order, cfg.cutoff);
    h.filtered = signal::filtfilt(filter, h.counts);
    const double top = *std::max_element(h.filtered.begin(), h.filtered.end());
    h.peaks = signal::find_peaks(h.filtered, cfg.prominence_frac * top);
    for (std::size_t p : h.peaks) h.times.push_back((static_cast<double>(p) + 0.5) / cfg.bins);
  } else {
    h.filtered = h.counts;
  }
  h.times.push_back(1.0);
  return h;
}

inline std::vector<double> extract_global_keypoints(std::span<const Gcacot> gcacots,
                                                    const KeypointExtractionConfig& cfg = {}) {
  return keypoint_histogram(gcacots, cfg).times;
}

/// Mean and standard deviation at time t by linear interpolation between the bracketing
/// keypoints, clamped outside their range. Angles interpolate along the shorter arc.
/// Keypoints supported by fewer than `min_n` demonstrations are skipped unless no
/// keypoint reaches that support.
inline std::pair<double, double> target_at(const Gcacot& g, double t, int min_n = 1) {
  if (g.keypoints.empty()) throw std::logic_error("target_at: GCACOT without keypoints");
  std::vector<GcacotKeypoint> supported;
  for (const auto& kp : g.keypoints)
    if (kp.n >= min_n) supported.push_back(kp);
  const auto& kps = supported.empty() ? g.keypoints : supported;
  if (t <= kps.front().t) return {kps.front().mean, kps.front().stddev};
  if (t >= kps.back().t) return {kps.back().mean, kps.back().stddev};
  auto hi = std::upper_bound(kps.begin(), kps.end(), t, [](double x, const auto& kp) { return x < kp.t; });
  auto lo = hi - 1;
  const double s = (t - lo->t) / (hi->t - lo->t);
  double mean;
  if (g.angular) mean = wrap_angle(lo->mean + s * wrap_angle(hi->mean - lo->mean));
  else mean = lo->mean + s * (hi->mean - lo->mean);
  return {mean, lo->stddev + s * (hi->stddev - lo->stddev)};
}

// ---------------------------------------------------------------------------
// Model

struct LearningConfig {
  SegmentationConfig segmentation{0.02, 1.0};
  MatchConfig matching;
  bool spawn_unmatched = true;
  bool include_same_object_pairs = true;
  KeypointExtractionConfig keypoints;
};

/// Spatial bimanual action model: all GCACOTs of one constraint kind plus the global
/// keypoint times at which execution places the objects.
struct Sbam {
  ConstraintKind kind = ConstraintKind::Cartesian;
  std::vector<SymbolicConstraintDef> symbolic_defs;
  std::vector<ObjectDecl> objects;
  std::vector<Gcacot> gcacots;
  std::vector<double> global_keypoints;
  int demo_count = 0;
  LearningConfig config;

  std::vector<RegionPair> pairs() const {
    std::vector<RegionPair> out;
    for (const auto& g : gcacots)
      if (std::find(out.begin(), out.end(), g.pair) == out.end()) out.push_back(g.pair);
    return out;
  }
};

/// Single-writer accumulator of demonstrations into GCACOTs.
class SbamBuilder {
 public:
  SbamBuilder(ConstraintKind kind, std::vector<SymbolicConstraintDef> defs, std::vector<ObjectDecl> objects,
              LearningConfig cfg = {})
      : kind_(kind), defs_(std::move(defs)), objects_(std::move(objects)), cfg_(cfg) {
    if (kind_ == ConstraintKind::Symbolic && defs_.empty())
      throw InputError("symbolic SBAM requires a constraint set");
    const auto labels = dimension_labels(kind_, defs_);
    for (const auto& pair : enumerate_pairs(objects_, cfg_.include_same_object_pairs))
      for (std::size_t d = 0; d < labels.size(); ++d)
        gcacots_.push_back({pair, kind_, d, labels[d], is_angular_dimension(kind_, d), {}});
  }

  const std::vector<Gcacot>& gcacots() const { return gcacots_; }
  const std::vector<ObjectDecl>& objects() const { return objects_; }
  const std::vector<SymbolicConstraintDef>& symbolic_defs() const { return defs_; }
  ConstraintKind kind() const { return kind_; }
  int demo_count() const { return demo_count_; }

  void ingest_demonstration(std::span<const DemoTrack> tracks) {
    std::vector<char> seen(gcacots_.size(), 0);
    std::vector<std::size_t> target(tracks.size());
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      const std::size_t g = index_of(tracks[i].pair, tracks[i].dim);
      if (seen[g]) throw InputError("duplicate track for '" + tracks[i].pair.label() + "'");
      seen[g] = 1;
      target[i] = g;
      for (std::size_t c = 1; c < tracks[i].candidates.size(); ++c)
        if (!(tracks[i].candidates[c].t > tracks[i].candidates[c - 1].t))
          throw InputError("keypoint candidates must be sorted by time");
    }
    for (std::size_t i = 0; i < tracks.size(); ++i) merge_into(gcacots_[target[i]], tracks[i].candidates);
    ++demo_count_;
  }

  Sbam finish() const {
    Sbam out;
    out.kind = kind_;
    out.symbolic_defs = kind_ == ConstraintKind::Symbolic ? defs_ : std::vector<SymbolicConstraintDef>{};
    out.objects = objects_;
    out.gcacots = gcacots_;
    out.global_keypoints = extract_global_keypoints(gcacots_, cfg_.keypoints);
    out.demo_count = demo_count_;
    out.config = cfg_;
    return out;
  }

 private:
  std::size_t index_of(const RegionPair& pair, std::size_t dim) const {
    for (std::size_t g = 0; g < gcacots_.size(); ++g)
      if (gcacots_[g].dim == dim && gcacots_[g].pair == pair) return g;
    throw InputError("track for unknown region pair '" + pair.label() + "' (dimension " + std::to_string(dim) + ")");
  }

  void merge_into(Gcacot& g, std::span<const KeypointCandidate> incoming) const {
    if (g.keypoints.empty()) {
      for (const auto& c : incoming) g.keypoints.push_back({c.t, c.v, 0.0, 1});
      return;
    }
    const MatchResult match = match_candidates(g, incoming, cfg_.matching);
    std::vector<GcacotKeypoint> updated = g.keypoints;
    std::vector<GcacotKeypoint> spawned;
    for (std::size_t i = 0; i < incoming.size(); ++i) {
      if (match.assignment[i]) {
        const std::size_t e = *match.assignment[i];
        updated[e] = update_keypoint(g.keypoints[e], incoming[i].t, incoming[i].v, g.angular);
      } else if (cfg_.spawn_unmatched) {
        spawned.push_back({incoming[i].t, incoming[i].v, 0.0, 1});
      }
    }
    updated.insert(updated.end(), spawned.begin(), spawned.end());
    std::stable_sort(updated.begin(), updated.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    // keep times strictly increasing; on a tie the better supported keypoint survives
    std::vector<GcacotKeypoint> strict;
    for (const auto& kp : updated) {
      if (!strict.empty() && !(kp.t > strict.back().t)) {
        if (kp.n > strict.back().n) strict.back() = kp;
        continue;
      }
      strict.push_back(kp);
    }
    g.keypoints = std::move(strict);
  }

  ConstraintKind kind_;
  std::vector<SymbolicConstraintDef> defs_;
  std::vector<ObjectDecl> objects_;
  LearningConfig cfg_;
  std::vector<Gcacot> gcacots_;
  int demo_count_ = 0;
};

}  // namespace sbam
