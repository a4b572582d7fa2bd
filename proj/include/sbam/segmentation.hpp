#pragma once

#include "sbam/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace sbam {

struct Sample {
  double t = 0.0;
  double v = 0.0;
};

struct SegmentationResult {
  std::vector<std::size_t> breakpoints;  // sample indices, first and last included
  std::vector<double> residual_areas;    // one per segment
  double epsilon = 0.0;                  // absolute area threshold that was applied
};

struct SegmentationConfig {
  double eps_rel = 0.02;
  // When > 0, the area threshold is at least noise_floor * sigma * duration, with sigma a
  // robust estimate of the sample noise. Zero disables the floor.
  double noise_floor = 0.0;
};

namespace detail {

/// Area of |v - chord| over [t_i, t_j]. Stops accumulating once the area exceeds
/// `bound` and returns the partial sum.
inline double residual_area_bounded(std::span<const Sample> s, std::size_t i, std::size_t j,
                                    double bound) {
  const double t0 = s[i].t, v0 = s[i].v;
  const double slope = (s[j].v - v0) / (s[j].t - t0);
  double area = 0.0;
  double r_prev = 0.0;  // residual at the chord endpoints is zero by construction
  for (std::size_t m = i + 1; m <= j; ++m) {
    const double r = (m == j) ? 0.0 : s[m].v - (v0 + slope * (s[m].t - t0));
    const double dt = s[m].t - s[m - 1].t;
    const double a = std::abs(r_prev), b = std::abs(r);
    if ((r_prev >= 0.0) == (r >= 0.0) || a == 0.0 || b == 0.0) {
      area += 0.5 * (a + b) * dt;
    } else {
      // the residual crosses zero inside the interval; integrate both triangles
      area += 0.5 * dt * (a * a + b * b) / (a + b);
    }
    if (area > bound) return area;
    r_prev = r;
  }
  return area;
}

/// Running trapezoid integral of the samples; prefix[m] covers [t_0, t_m].
inline std::vector<double> trapezoid_prefix(std::span<const Sample> s) {
  std::vector<double> p(s.size(), 0.0);
  for (std::size_t m = 1; m < s.size(); ++m) p[m] = p[m - 1] + 0.5 * (s[m].v + s[m - 1].v) * (s[m].t - s[m - 1].t);
  return p;
}

/// Lower bound on the residual area over [t_i, t_j]: the sum of |signed residual area| over
/// a few sub-intervals, each O(1) from the prefix integral. The exact area integrates |r| per
/// sample interval, so it is never smaller.
inline double area_lower_bound(std::span<const Sample> s, std::span<const double> prefix, std::size_t i,
                               std::size_t j) {
  constexpr std::size_t kPieces = 8;
  const double t0 = s[i].t, v0 = s[i].v;
  const double slope = (s[j].v - v0) / (s[j].t - t0);
  const std::size_t pieces = std::min(kPieces, j - i);
  double bound = 0.0;
  std::size_t a = i;
  for (std::size_t q = 1; q <= pieces; ++q) {
    const std::size_t b = i + (j - i) * q / pieces;
    const double chord = 0.5 * (2.0 * v0 + slope * (s[a].t - t0 + s[b].t - t0)) * (s[b].t - s[a].t);
    bound += std::abs(prefix[b] - prefix[a] - chord);
    a = b;
  }
  return bound;
}

/// Smallest-index split k in (i, j) minimizing A(i,k) + A(k,j). When `eps` is finite only
/// splits leaving both sides at or below eps are admissible. Candidates are visited in order
/// of a lower bound on their total, so the scan stops once the bound passes the best total.
inline std::pair<std::size_t, double> best_split(std::span<const Sample> s, std::span<const double> prefix,
                                                 std::size_t i, std::size_t j, double eps) {
  const double inf = std::numeric_limits<double>::infinity();
  // the bound differences prefix sums; their rounding error is bounded relative to
  // max |v| times the full duration
  double vmax = 0.0;
  for (const auto& x : s) vmax = std::max(vmax, std::abs(x.v));
  const double tol = 1e-11 * vmax * (s.back().t - s.front().t);
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(j - i);
  for (std::size_t k = i + 1; k < j; ++k) {
    const double lo_left = area_lower_bound(s, prefix, i, k), lo_right = area_lower_bound(s, prefix, k, j);
    if (lo_left - tol > eps || lo_right - tol > eps) continue;
    order.emplace_back(lo_left + lo_right, k);
  }
  std::sort(order.begin(), order.end());
  std::size_t best_k = j;
  double best = inf;
  for (const auto& [bound, k] : order) {
    if (bound - 2.0 * tol > best) break;
    const double left = residual_area_bounded(s, i, k, std::min(best, eps));
    if (left > best || left > eps) continue;
    const double right = residual_area_bounded(s, k, j, std::min(best - left, eps));
    if (right > eps) continue;
    const double total = left + right;
    if (total < best || (total == best && k < best_k)) {
      best = total;
      best_k = k;
    }
  }
  return {best_k, best};
}

inline std::pair<std::size_t, double> best_split(std::span<const Sample> s, std::size_t i, std::size_t j,
                                                 double eps) {
  return best_split(s, trapezoid_prefix(s), i, j, eps);
}

inline double robust_noise_sigma(std::span<const Sample> s) {
  if (s.size() < 3) return 0.0;
  std::vector<double> d2;
  d2.reserve(s.size() - 2);
  for (std::size_t m = 1; m + 1 < s.size(); ++m)
    d2.push_back(std::abs(s[m + 1].v - 2.0 * s[m].v + s[m - 1].v));
  auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
  std::nth_element(d2.begin(), mid, d2.end());
  // MAD of second differences; var(d2) = 6 sigma^2 for white noise
  return 1.4826 * *mid / std::sqrt(6.0);
}

}  // namespace detail

/// Area between the samples and the straight line joining samples i and j, by the
/// trapezoid rule with each interval split where the residual changes sign.
inline double residual_area(std::span<const Sample> samples, std::size_t i, std::size_t j) {
  if (!(i < j) || j >= samples.size()) throw std::out_of_range("residual_area: need i < j < size");
  return detail::residual_area_bounded(samples, i, j, std::numeric_limits<double>::infinity());
}

inline double estimate_noise_sigma(std::span<const Sample> samples) {
  return detail::robust_noise_sigma(samples);
}

/// Piecewise-linear segmentation by recursive minimum-area splitting followed by a left-to-right
/// merge pass over consecutive segment pairs, whose re-placement step repeats until stable.
inline SegmentationResult segment(std::span<const Sample> samples, const SegmentationConfig& cfg) {
  const std::size_t n = samples.size();
  if (n < 2) throw InputError("segment: need at least 2 samples");
  if (!(cfg.eps_rel > 0.0)) throw InputError("segment: eps_rel must be > 0");
  for (std::size_t m = 1; m < n; ++m)
    if (!(samples[m].t > samples[m - 1].t))
      throw InputError("segment: sample times must be strictly increasing");

  SegmentationResult out;
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                            [](const Sample& a, const Sample& b) { return a.v < b.v; });
  const double amplitude = hi->v - lo->v;
  const double duration = samples.back().t - samples.front().t;
  // a range within rounding of the magnitude (e.g. rigid same-object pairs) is constant
  const double scale = std::max(std::abs(hi->v), std::abs(lo->v));
  if (!(amplitude > 1e-12 * scale)) {
    out.breakpoints = {0, n - 1};
    out.residual_areas = {0.0};
    return out;
  }
  double eps = cfg.eps_rel * amplitude * duration;
  if (cfg.noise_floor > 0.0)
    eps = std::max(eps, cfg.noise_floor * detail::robust_noise_sigma(samples) * duration);
  out.epsilon = eps;

  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> prefix = detail::trapezoid_prefix(samples);
  std::vector<std::size_t> bp{0, n - 1};
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    stack.pop_back();
    if (j - i < 2 || residual_area(samples, i, j) <= eps) continue;
    const std::size_t k = detail::best_split(samples, prefix, i, j, inf).first;
    bp.push_back(k);
    stack.emplace_back(k, j);
    stack.emplace_back(i, k);
  }
  std::sort(bp.begin(), bp.end());

  // one merge pass, then re-placement passes until stable; a breakpoint only moves when the
  // pair area strictly drops, so the total area decreases with every move and this terminates
  for (bool first = true, changed = true; changed; first = false) {
    changed = false;
    std::size_t idx = 1;
    while (idx + 1 < bp.size()) {
      const std::size_t a = bp[idx - 1], b = bp[idx], c = bp[idx + 1];
      if (first && residual_area(samples, a, c) <= eps) {
        bp.erase(bp.begin() + static_cast<std::ptrdiff_t>(idx));
        continue;
      }
      const auto [k, total] = detail::best_split(samples, prefix, a, c, eps);
      if (k < c && k != b && total < residual_area(samples, a, b) + residual_area(samples, b, c)) {
        bp[idx] = k;
        changed = true;
      }
      ++idx;
    }
  }

  out.breakpoints = bp;
  out.residual_areas.reserve(bp.size() - 1);
  for (std::size_t m = 0; m + 1 < bp.size(); ++m)
    out.residual_areas.push_back(residual_area(samples, bp[m], bp[m + 1]));
  return out;
}

inline SegmentationResult segment(std::span<const Sample> samples, double eps_rel) {
  return segment(samples, SegmentationConfig{eps_rel, 0.0});
}

/// Removes 2*pi jumps between consecutive angles.
inline std::vector<double> unwrap_angles(std::span<const double> angles) {
  std::vector<double> out(angles.begin(), angles.end());
  double offset = 0.0;
  for (std::size_t m = 1; m < out.size(); ++m) {
    const double step = angles[m] - angles[m - 1];
    if (step > M_PI) offset -= 2.0 * M_PI;
    else if (step < -M_PI) offset += 2.0 * M_PI;
    out[m] = angles[m] + offset;
  }
  return out;
}

}  // namespace sbam
